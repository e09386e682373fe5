#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedroute/profile.hpp"
#include "fedroute/router.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

struct TasrConfig {
    double gamma = 0.9;        // decay, in (0, 1)
    double gamma_rec = 1.02;   // recovery, >= 1
    std::size_t warmup = 50;   // W: no trust updates while t <= W
    double s0 = 0.7;           // cold-start base, in (0, 1]
    double tau_s = 50.0;       // cold-start horizon in queries
    double alpha_r = 2.0;      // relevance exponent, >= 1
    double delta = 0.1;        // soft-gate margin, > 0
    std::size_t k_route = 3;   // clients selected for feedback collection
    std::size_t m = 5;         // evidence docs per selected client
    bool use_cons = true;      // signal ablations (rel-only, rel+cons, full)
    bool use_agr = true;

    void validate() const;
};

struct ClientTrust {
    double u_rel = 1.0;
    double u_cons = 1.0;
    double u_agr = 1.0;
    double s = 1.0;  // cold-start factor
};

struct TrustRegistry {
    std::size_t t = 0;  // global query counter
    std::map<std::string, ClientTrust> clients;
};

TrustRegistry make_trust_registry(const std::vector<std::string>& client_ids,
                                  const TasrConfig& cfg);

// g(x) = delta + (1 - delta) x, range [delta, 1].
double soft_gate(double x, double delta);

// min(1, s0 + (1 - s0) t / tau_s)
double cold_start_ramp(std::size_t t, double s0, double tau_s);

// tau = s * u_rel^alpha_r * g(u_cons) * g(u_agr); ablated signals contribute 1.
double trust_weight(const ClientTrust& state, const TasrConfig& cfg);

// Trust-weighted routing: normalize base scores, multiply by tau, top-k.
RoutingDecision tasr_route(const ScoreMap& base_scores, const TrustRegistry& trust,
                           const TasrConfig& cfg, std::size_t k,
                           const std::string& query_id = "");

struct Feedback {
    double f_rel = 0.0;
    double f_cons = 0.0;
    double f_agr = 0.0;
    bool rel_valid = false;
    bool cons_valid = false;
    bool agr_valid = false;
};

// Mean evidence-query cosine, mapped from [-1, 1] to [0, 1].
double feedback_relevance(const Vec& query, const std::vector<DocumentRecord>& evidence);

// Softmax-weighted centroid-evidence cosine, mapped to [0, 1].
double feedback_consistency(const Vec& query, const ClientProfile& profile,
                            const std::vector<DocumentRecord>& evidence);

// Per-client agreement against peers whose relevance is at or above the
// median relevance among selected clients. nullopt = uninformative (no peers).
// `evidence` and `f_rel` are keyed by selected client id.
std::map<std::string, std::optional<double>> feedback_agreement(
    const std::map<std::string, std::vector<DocumentRecord>>& evidence,
    const std::map<std::string, double>& f_rel);

// Phase 3 of the online loop: advances t, ramps the cold-start factor, and
// when t > W applies the median-thresholded decay/recovery per signal.
// Only the clients present in `feedback` (the selected set) are updated.
void trust_update(TrustRegistry& trust, const std::map<std::string, Feedback>& feedback,
                  const TasrConfig& cfg);

// Lower median: ascending order statistic at index (n-1)/2.
double lower_median(std::vector<double> values);

nlohmann::ordered_json trust_to_json(const TrustRegistry& trust);
TrustRegistry trust_from_json(const nlohmann::json& j);

}  // namespace fedroute
