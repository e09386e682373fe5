#include "fedroute/router.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedroute/rng.hpp"

namespace fedroute {

RoutingDecision route_topk(const ScoreMap& scores, std::size_t k,
                           const std::string& query_id) {
    if (scores.empty()) throw std::invalid_argument("route_topk: no clients");
    if (k < 1 || k > scores.size())
        throw std::invalid_argument("route_topk: k=" + std::to_string(k) +
                                    " out of range [1, " +
                                    std::to_string(scores.size()) + "]");
    RoutingDecision d;
    d.query_id = query_id;
    d.k = k;
    d.ranked.assign(scores.begin(), scores.end());
    std::sort(d.ranked.begin(), d.ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    d.top_k.reserve(k);
    for (std::size_t i = 0; i < k; ++i) d.top_k.push_back(d.ranked[i].first);
    return d;
}

ScoreMap normalize_scores(const ScoreMap& scores) {
    if (scores.empty()) throw std::invalid_argument("normalize_scores: no clients");
    constexpr double eps = 1e-6;
    double lo = scores.begin()->second, hi = lo;
    for (const auto& [id, s] : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    ScoreMap out;
    for (const auto& [id, s] : scores)
        out[id] = (s - lo + eps) / (hi - lo + eps);
    return out;
}

namespace {

std::vector<double> build_features(const NeuralRouterModel& m, const Vec& query,
                                   const ClientProfile& profile) {
    if (query.size() != m.dim)
        throw std::invalid_argument("score_neural: query dim " +
                                    std::to_string(query.size()) +
                                    " does not match model dim " +
                                    std::to_string(m.dim));
    // Best centroid by cosine.
    std::size_t best = 0;
    double bestc = -2.0;
    for (std::size_t i = 0; i < profile.centroids.size(); ++i) {
        const double c = cosine(query, profile.centroids[i]);
        if (c > bestc) { bestc = c; best = i; }
    }
    const Vec& p = profile.centroids[best];
    std::vector<double> f(3 * m.dim + 1);
    for (std::size_t i = 0; i < m.dim; ++i) {
        f[i] = query[i];
        f[m.dim + i] = p[i];
        f[2 * m.dim + i] = query[i] * p[i];
    }
    f[3 * m.dim] = bestc;
    return f;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Forward {
    std::vector<double> h;      // post-ReLU hidden activations
    std::vector<double> preh;   // pre-activation
    double z = 0.0;             // output logit
    double y = 0.5;             // sigmoid(z)
};

Forward forward_pass(const NeuralRouterModel& m, const std::vector<double>& f) {
    Forward fw;
    const std::size_t in = m.input_width();
    fw.preh.resize(m.hidden);
    fw.h.resize(m.hidden);
    for (std::size_t j = 0; j < m.hidden; ++j) {
        double s = m.b1[j];
        const double* row = &m.w1[j * in];
        for (std::size_t i = 0; i < in; ++i) s += row[i] * f[i];
        fw.preh[j] = s;
        fw.h[j] = s > 0.0 ? s : 0.0;
    }
    fw.z = m.b2;
    for (std::size_t j = 0; j < m.hidden; ++j) fw.z += m.w2[j] * fw.h[j];
    fw.y = sigmoid(fw.z);
    return fw;
}

}  // namespace

double score_neural(const NeuralRouterModel& model, const Vec& query,
                    const ClientProfile& profile) {
    const auto f = build_features(model, query, profile);
    return forward_pass(model, f).y;
}

NeuralTrainResult train_neural_router(const std::vector<TrainPair>& pairs,
                                      const NeuralTrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train_neural_router: epochs must be >= 1");
    if (cfg.learning_rate <= 0.0)
        throw std::invalid_argument("train_neural_router: learning_rate must be > 0");
    if (pairs.empty()) throw std::invalid_argument("train_neural_router: no pairs");
    bool has0 = false, has1 = false;
    for (const auto& p : pairs) (p.label ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::invalid_argument("train_neural_router: training set contains a single label");

    NeuralRouterModel m;
    m.dim = pairs.front().query.size();
    m.hidden = cfg.hidden;
    const std::size_t in = m.input_width();

    Rng rng(cfg.seed);
    const double scale1 = std::sqrt(2.0 / static_cast<double>(in));
    const double scale2 = std::sqrt(2.0 / static_cast<double>(m.hidden));
    m.w1.resize(m.hidden * in);
    for (auto& w : m.w1) w = scale1 * rng.gaussian();
    m.b1.assign(m.hidden, 0.0);
    m.w2.resize(m.hidden);
    for (auto& w : m.w2) w = scale2 * rng.gaussian();
    m.b2 = 0.0;

    // Feature cache.
    std::vector<std::vector<double>> feats(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        feats[i] = build_features(m, pairs[i].query, pairs[i].profile);

    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> gw1(m.hidden * in), gb1(m.hidden), gw2(m.hidden);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Deterministic shuffle per epoch.
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const std::size_t j = i + rng.uniform_index(order.size() - i);
            std::swap(order[i], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::fill(gw1.begin(), gw1.end(), 0.0);
            std::fill(gb1.begin(), gb1.end(), 0.0);
            std::fill(gw2.begin(), gw2.end(), 0.0);
            double gb2 = 0.0;
            for (std::size_t s = start; s < end; ++s) {
                const auto& f = feats[order[s]];
                const auto fw = forward_pass(m, f);
                const double dz = fw.y - static_cast<double>(pairs[order[s]].label);
                gb2 += dz;
                for (std::size_t j = 0; j < m.hidden; ++j) {
                    gw2[j] += dz * fw.h[j];
                    if (fw.preh[j] > 0.0) {
                        const double dh = dz * m.w2[j];
                        gb1[j] += dh;
                        double* grow = &gw1[j * in];
                        for (std::size_t i = 0; i < in; ++i) grow[i] += dh * f[i];
                    }
                }
            }
            const double lr = cfg.learning_rate / static_cast<double>(end - start);
            for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= lr * gw1[i];
            for (std::size_t j = 0; j < m.hidden; ++j) {
                m.b1[j] -= lr * gb1[j];
                m.w2[j] -= lr * gw2[j];
            }
            m.b2 -= lr * gb2;
        }
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double y = forward_pass(m, feats[i]).y;
        if ((y >= 0.5 ? 1 : 0) == pairs[i].label) ++correct;
    }
    return {std::move(m), static_cast<double>(correct) / static_cast<double>(pairs.size())};
}

nlohmann::ordered_json neural_model_to_json(const NeuralRouterModel& m) {
    nlohmann::ordered_json j;
    j["dim"] = m.dim;
    j["hidden"] = m.hidden;
    j["w1"] = m.w1;
    j["b1"] = m.b1;
    j["w2"] = m.w2;
    j["b2"] = m.b2;
    return j;
}

NeuralRouterModel neural_model_from_json(const nlohmann::json& j) {
    NeuralRouterModel m;
    m.dim = j.at("dim").get<std::size_t>();
    m.hidden = j.at("hidden").get<std::size_t>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<double>();
    if (m.w1.size() != m.hidden * m.input_width())
        throw std::runtime_error("neural_model_from_json: w1 shape mismatch");
    return m;
}

nlohmann::ordered_json decision_to_json(const RoutingDecision& d) {
    nlohmann::ordered_json j;
    j["query_id"] = d.query_id;
    j["k"] = d.k;
    auto ranked = nlohmann::ordered_json::array();
    for (const auto& [id, s] : d.ranked) ranked.push_back({id, s});
    j["ranked"] = ranked;
    j["top_k"] = d.top_k;
    return j;
}

}  // namespace fedroute
