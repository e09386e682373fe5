#include "fedroute/tasr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedroute {

void TasrConfig::validate() const {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("tasr: gamma must be in (0, 1)");
    if (gamma_rec < 1.0) throw std::invalid_argument("tasr: gamma_rec must be >= 1");
    if (s0 <= 0.0 || s0 > 1.0) throw std::invalid_argument("tasr: s0 must be in (0, 1]");
    if (tau_s <= 0.0) throw std::invalid_argument("tasr: tau_s must be > 0");
    if (alpha_r < 1.0) throw std::invalid_argument("tasr: alpha_r must be >= 1");
    if (delta <= 0.0) throw std::invalid_argument("tasr: delta must be > 0");
    if (k_route < 1) throw std::invalid_argument("tasr: k_route must be >= 1");
    if (m < 1) throw std::invalid_argument("tasr: m must be >= 1");
}

TrustRegistry make_trust_registry(const std::vector<std::string>& client_ids,
                                  const TasrConfig& cfg) {
    TrustRegistry reg;
    for (const auto& id : client_ids) {
        ClientTrust ct;
        ct.s = cfg.s0;
        reg.clients[id] = ct;
    }
    return reg;
}

double soft_gate(double x, double delta) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("soft_gate: x must be in [0, 1]");
    return delta + (1.0 - delta) * x;
}

double cold_start_ramp(std::size_t t, double s0, double tau_s) {
    if (tau_s <= 0.0) throw std::invalid_argument("cold_start_ramp: tau_s must be > 0");
    return std::min(1.0, s0 + (1.0 - s0) * static_cast<double>(t) / tau_s);
}

double trust_weight(const ClientTrust& state, const TasrConfig& cfg) {
    double tau = state.s * std::pow(state.u_rel, cfg.alpha_r);
    if (cfg.use_cons) tau *= soft_gate(state.u_cons, cfg.delta);
    if (cfg.use_agr) tau *= soft_gate(state.u_agr, cfg.delta);
    return tau;
}

RoutingDecision tasr_route(const ScoreMap& base_scores, const TrustRegistry& trust,
                           const TasrConfig& cfg, std::size_t k,
                           const std::string& query_id) {
    const ScoreMap normed = normalize_scores(base_scores);
    ScoreMap weighted;
    for (const auto& [id, s] : normed) {
        const auto it = trust.clients.find(id);
        if (it == trust.clients.end())
            throw std::invalid_argument("tasr_route: no trust state for client " + id);
        weighted[id] = s * trust_weight(it->second, cfg);
    }
    return route_topk(weighted, k, query_id);
}

namespace {
double to_unit_interval(double c) { return (c + 1.0) / 2.0; }
}

double feedback_relevance(const Vec& query, const std::vector<DocumentRecord>& evidence) {
    if (evidence.empty())
        throw std::invalid_argument("feedback_relevance: empty evidence");
    double s = 0.0;
    for (const auto& d : evidence) s += cosine(query, d.embedding);
    return to_unit_interval(s / static_cast<double>(evidence.size()));
}

double feedback_consistency(const Vec& query, const ClientProfile& profile,
                            const std::vector<DocumentRecord>& evidence) {
    if (evidence.empty())
        throw std::invalid_argument("feedback_consistency: empty evidence");
    if (profile.centroids.empty())
        throw std::invalid_argument("feedback_consistency: profile has no centroids");
    const std::size_t kp = profile.centroids.size();

    // Query-dependent softmax weights over centroid-query similarities.
    std::vector<double> w(kp);
    double maxsim = -2.0;
    for (std::size_t k = 0; k < kp; ++k) {
        w[k] = cosine(query, profile.centroids[k]);
        maxsim = std::max(maxsim, w[k]);
    }
    double z = 0.0;
    for (auto& x : w) {
        x = std::exp(x - maxsim);
        z += x;
    }
    for (auto& x : w) x /= z;

    double s = 0.0;
    for (const auto& d : evidence)
        for (std::size_t k = 0; k < kp; ++k)
            s += w[k] * cosine(profile.centroids[k], d.embedding);
    return to_unit_interval(s / static_cast<double>(evidence.size()));
}

double lower_median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("lower_median: empty");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

std::map<std::string, std::optional<double>> feedback_agreement(
    const std::map<std::string, std::vector<DocumentRecord>>& evidence,
    const std::map<std::string, double>& f_rel) {
    if (evidence.empty())
        throw std::invalid_argument("feedback_agreement: no selected clients");
    std::vector<double> rels;
    rels.reserve(f_rel.size());
    for (const auto& [id, r] : f_rel) rels.push_back(r);
    const double theta_rel = lower_median(rels);

    std::map<std::string, std::optional<double>> out;
    for (const auto& [id, ev] : evidence) {
        // Peer pool: evidence of other selected clients at or above median relevance.
        std::vector<const Vec*> pool;
        for (const auto& [pid, pev] : evidence) {
            if (pid == id) continue;
            const auto it = f_rel.find(pid);
            if (it == f_rel.end() || it->second < theta_rel) continue;
            for (const auto& d : pev) pool.push_back(&d.embedding);
        }
        if (pool.empty() || ev.empty()) {
            out[id] = std::nullopt;
            continue;
        }
        double s = 0.0;
        for (const auto& d : ev) {
            double best = -1.0;
            for (const Vec* z : pool) best = std::max(best, cosine(d.embedding, *z));
            s += best;
        }
        out[id] = to_unit_interval(s / static_cast<double>(ev.size()));
    }
    return out;
}

void trust_update(TrustRegistry& trust, const std::map<std::string, Feedback>& feedback,
                  const TasrConfig& cfg) {
    trust.t += 1;
    const double s = cold_start_ramp(trust.t, cfg.s0, cfg.tau_s);
    for (auto& [id, ct] : trust.clients) ct.s = s;
    if (trust.t <= cfg.warmup) return;

    struct Signal {
        bool enabled;
        double Feedback::*value;
        bool Feedback::*valid;
        double ClientTrust::*var;
    };
    const Signal signals[] = {
        {true, &Feedback::f_rel, &Feedback::rel_valid, &ClientTrust::u_rel},
        {cfg.use_cons, &Feedback::f_cons, &Feedback::cons_valid, &ClientTrust::u_cons},
        {cfg.use_agr, &Feedback::f_agr, &Feedback::agr_valid, &ClientTrust::u_agr},
    };
    for (const auto& sig : signals) {
        if (!sig.enabled) continue;
        std::vector<double> valid;
        for (const auto& [id, fb] : feedback)
            if (fb.*(sig.valid)) valid.push_back(fb.*(sig.value));
        if (valid.empty()) continue;
        const double theta = lower_median(valid);
        for (const auto& [id, fb] : feedback) {
            if (!(fb.*(sig.valid))) continue;
            auto it = trust.clients.find(id);
            if (it == trust.clients.end())
                throw std::invalid_argument("trust_update: unknown client " + id);
            double& u = it->second.*(sig.var);
            if (fb.*(sig.value) < theta)
                u = cfg.gamma * u;
            else
                u = std::min(1.0, cfg.gamma_rec * u);
        }
    }
}

nlohmann::ordered_json trust_to_json(const TrustRegistry& trust) {
    nlohmann::ordered_json j;
    j["t"] = trust.t;
    nlohmann::ordered_json clients;
    for (const auto& [id, ct] : trust.clients) {
        clients[id] = {{"u_rel", ct.u_rel},
                       {"u_cons", ct.u_cons},
                       {"u_agr", ct.u_agr},
                       {"s", ct.s}};
    }
    j["clients"] = clients;
    return j;
}

TrustRegistry trust_from_json(const nlohmann::json& j) {
    TrustRegistry reg;
    reg.t = j.at("t").get<std::size_t>();
    for (const auto& [id, c] : j.at("clients").items()) {
        ClientTrust ct;
        ct.u_rel = c.at("u_rel").get<double>();
        ct.u_cons = c.at("u_cons").get<double>();
        ct.u_agr = c.at("u_agr").get<double>();
        ct.s = c.at("s").get<double>();
        reg.clients[id] = ct;
    }
    return reg;
}

}  // namespace fedroute
