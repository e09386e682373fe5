#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fedroute/kernels.hpp"
#include "fedroute/profile.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

using ScoreMap = std::map<std::string, double>;

struct RoutingDecision {
    std::string query_id;
    std::vector<std::pair<std::string, double>> ranked;  // score desc, id asc on ties
    std::vector<std::string> top_k;                      // first k of ranked
    std::size_t k = 0;
};

// Top-k selection over a score table. Ties broken by ascending client id,
// so the result is a pure function of the score map.
RoutingDecision route_topk(const ScoreMap& scores, std::size_t k,
                           const std::string& query_id = "");

// Min-max map s -> (s - min + eps) / (max - min + eps), eps = 1e-6.
// Outputs in (0, 1]; strict order preserved; constant input maps to all 1.
ScoreMap normalize_scores(const ScoreMap& scores);

// Feed-forward scorer over [query || best-centroid || query*best-centroid || cos],
// one ReLU hidden layer, sigmoid output.
struct NeuralRouterModel {
    std::size_t dim = 0;     // embedding dim
    std::size_t hidden = 64;
    std::vector<double> w1;  // hidden x (3*dim+1), row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;

    std::size_t input_width() const { return 3 * dim + 1; }
};

struct TrainPair {
    Vec query;
    ClientProfile profile;
    int label = 0;  // 1 = relevant
};

struct NeuralTrainConfig {
    std::size_t epochs = 30;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t hidden = 64;
    std::uint64_t seed = 0;
};

struct NeuralTrainResult {
    NeuralRouterModel model;
    double train_accuracy = 0.0;
};

// Mini-batch gradient descent on binary cross-entropy; deterministic under seed.
NeuralTrainResult train_neural_router(const std::vector<TrainPair>& pairs,
                                      const NeuralTrainConfig& cfg);

// Sigmoid score in (0, 1); best centroid = argmax cosine over the profile.
double score_neural(const NeuralRouterModel& model, const Vec& query,
                    const ClientProfile& profile);

nlohmann::ordered_json neural_model_to_json(const NeuralRouterModel& m);
NeuralRouterModel neural_model_from_json(const nlohmann::json& j);

nlohmann::ordered_json decision_to_json(const RoutingDecision& d);

}  // namespace fedroute
