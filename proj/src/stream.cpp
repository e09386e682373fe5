#include "fedroute/stream.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fedroute/adversary.hpp"

namespace fedroute {

namespace {

ScoreMap base_scores(const Environment& env, const Vec& query) {
    ScoreMap scores;
    for (const auto& [id, profile] : env.registered) {
        if (env.excluded.count(id)) continue;
        if (env.cfg.router == RouterKind::neural)
            scores[id] = score_neural(*env.neural_model, query, profile);
        else
            scores[id] = score_cosine(query, profile, env.cfg.aggregation);
    }
    return scores;
}

std::vector<DocumentRecord> client_evidence(const Environment& env,
                                            const std::string& id, const Vec& query,
                                            std::size_t m) {
    for (const auto& mc : env.malicious)
        if (mc.client_id == id) return malicious_evidence(mc, query, m, default_exec());
    for (const auto& hc : env.honest) {
        if (hc.id != id) continue;
        const auto idx = top_m_by_cosine(query, hc.corpus, m, default_exec());
        std::vector<DocumentRecord> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(hc.corpus[i]);
        return out;
    }
    throw std::runtime_error("client_evidence: unknown client " + id);
}

}  // namespace

RunReport run_stream(const Environment& env, std::size_t start_t,
                     const TrustRegistry* resume_trust, std::size_t end_t) {
    const auto& cfg = env.cfg;
    if (end_t == 0) end_t = cfg.stream_length;
    if (end_t > cfg.stream_length || start_t > end_t)
        throw std::invalid_argument("run_stream: bad [start_t, end_t] window");

    const bool tasr_active = defense_is_tasr(cfg.defense);
    TasrConfig tcfg = cfg.tasr;
    tcfg.k_route = cfg.k_route;
    tcfg.use_cons = cfg.defense == DefenseKind::tasr_rel_cons ||
                    cfg.defense == DefenseKind::tasr_full;
    tcfg.use_agr = cfg.defense == DefenseKind::tasr_full;

    RunReport report;
    std::vector<std::string> ids;
    for (const auto& [id, p] : env.registered)
        if (!env.excluded.count(id)) ids.push_back(id);
    TrustRegistry trust = resume_trust ? *resume_trust : make_trust_registry(ids, tcfg);
    if (!resume_trust && start_t != 0)
        throw std::invalid_argument("run_stream: resuming mid-stream requires a trust snapshot");
    if (resume_trust && trust.t != start_t)
        throw std::invalid_argument("run_stream: snapshot t=" + std::to_string(trust.t) +
                                    " does not match start_t=" + std::to_string(start_t));

    report.queries.reserve(end_t - start_t);
    for (std::size_t t = start_t + 1; t <= end_t; ++t) {
        const StreamQuery q = sample_query(env, t);
        const auto t0 = std::chrono::steady_clock::now();

        QueryRecord rec;
        rec.t = t;
        rec.domain_id = q.domain_id;

        const ScoreMap scores = base_scores(env, q.embedding);
        if (tasr_active)
            rec.decision = tasr_route(scores, trust, tcfg, cfg.k_route, q.query_id);
        else
            rec.decision = route_topk(scores, cfg.k_route, q.query_id);

        if (tasr_active) {
            std::map<std::string, std::vector<DocumentRecord>> evidence;
            std::map<std::string, double> rels;
            for (const auto& id : rec.decision.top_k)
                evidence[id] = client_evidence(env, id, q.embedding, tcfg.m);
            for (const auto& id : rec.decision.top_k) {
                Feedback fb;
                const auto& ev = evidence[id];
                if (!ev.empty()) {
                    fb.f_rel = feedback_relevance(q.embedding, ev);
                    fb.rel_valid = true;
                    rels[id] = fb.f_rel;
                    if (tcfg.use_cons) {
                        fb.f_cons =
                            feedback_consistency(q.embedding, env.registered.at(id), ev);
                        fb.cons_valid = true;
                    }
                }
                rec.feedback[id] = fb;
            }
            if (tcfg.use_agr) {
                for (auto& [id, opt] : feedback_agreement(evidence, rels)) {
                    if (opt) {
                        rec.feedback[id].f_agr = *opt;
                        rec.feedback[id].agr_valid = true;
                    }
                }
            }
            trust_update(trust, rec.feedback, tcfg);
        } else {
            trust.t = t;  // keep the counter meaningful for snapshots
        }

        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        report.queries.push_back(std::move(rec));
    }
    report.final_trust = std::move(trust);
    return report;
}

namespace {

bool topk_hits(const RoutingDecision& d, const std::set<std::string>& targets,
               std::size_t k) {
    const std::size_t lim = std::min(k, d.ranked.size());
    for (std::size_t i = 0; i < lim; ++i)
        if (targets.count(d.ranked[i].first)) return true;
    return false;
}

}  // namespace

double metric_hr_at_k(const std::vector<QueryRecord>& queries,
                      const std::set<std::string>& adv_ids, std::size_t k) {
    if (queries.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& q : queries)
        if (topk_hits(q.decision, adv_ids, k)) ++hit;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(queries.size());
}

double metric_acc_at_k(const std::vector<QueryRecord>& queries,
                       const std::map<std::string, std::set<std::string>>& holders,
                       std::size_t k) {
    if (queries.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& q : queries) {
        const auto it = holders.find(q.domain_id);
        if (it == holders.end())
            throw std::runtime_error("metric_acc_at_k: no honest-target map entry for domain " +
                                     q.domain_id);
        if (topk_hits(q.decision, it->second, k)) ++hit;
    }
    return 100.0 * static_cast<double>(hit) / static_cast<double>(queries.size());
}

double metric_malrank(const std::vector<QueryRecord>& queries,
                      const std::set<std::string>& adv_ids) {
    if (queries.empty() || adv_ids.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& q : queries) {
        std::size_t best = q.decision.ranked.size() + 1;
        for (std::size_t i = 0; i < q.decision.ranked.size(); ++i) {
            if (adv_ids.count(q.decision.ranked[i].first)) {
                best = i + 1;
                break;
            }
        }
        sum += static_cast<double>(best);
    }
    return sum / static_cast<double>(queries.size());
}

Aggregates aggregate(const std::vector<QueryRecord>& queries, const Environment& env) {
    Aggregates a;
    a.n_queries = queries.size();
    if (queries.empty()) return a;
    a.hr1 = metric_hr_at_k(queries, env.adv_ids, 1);
    a.hr2 = metric_hr_at_k(queries, env.adv_ids, 2);
    a.hr3 = metric_hr_at_k(queries, env.adv_ids, 3);
    a.acc1 = metric_acc_at_k(queries, env.domain_holders, 1);
    a.acc3 = metric_acc_at_k(queries, env.domain_holders, 3);
    a.malrank = metric_malrank(queries, env.adv_ids);

    if (!env.adv_ids.empty()) {
        double msum = 0.0;
        std::size_t mcount = 0;
        for (const auto& q : queries) {
            const auto it = env.domain_holders.find(q.domain_id);
            if (it == env.domain_holders.end()) continue;
            double best_adv = std::nan("");
            double best_hon = std::nan("");
            for (const auto& [id, s] : q.decision.ranked) {
                if (std::isnan(best_adv) && env.adv_ids.count(id)) best_adv = s;
                if (std::isnan(best_hon) && it->second.count(id)) best_hon = s;
            }
            if (!std::isnan(best_adv) && !std::isnan(best_hon)) {
                msum += best_adv - best_hon;
                ++mcount;
            }
        }
        a.margin = mcount ? msum / static_cast<double>(mcount) : 0.0;
    }
    return a;
}

SplitReport split_early_post(const RunReport& report, const Environment& env,
                             std::size_t warmup) {
    if (warmup >= env.cfg.stream_length)
        throw std::invalid_argument("split_early_post: warmup >= stream length");
    std::vector<QueryRecord> early, post, burned;
    for (const auto& q : report.queries) {
        if (q.t <= warmup)
            early.push_back(q);
        else
            post.push_back(q);
        if (q.t > warmup + env.cfg.post_burn_in) burned.push_back(q);
    }
    SplitReport sr;
    if (!early.empty()) sr.early = aggregate(early, env);
    sr.post = aggregate(post, env);
    sr.post_burned = aggregate(burned, env);
    return sr;
}

TimingStats timing_stats(const RunReport& report) {
    TimingStats ts;
    if (report.queries.empty()) return ts;
    std::vector<double> ms;
    ms.reserve(report.queries.size());
    double sum = 0.0;
    for (const auto& q : report.queries) {
        ms.push_back(q.wall_ms);
        sum += q.wall_ms;
    }
    ts.mean_ms = sum / static_cast<double>(ms.size());
    std::sort(ms.begin(), ms.end());
    const std::size_t idx =
        std::min(ms.size() - 1,
                 static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size()))) - 1);
    ts.p95_ms = ms[idx];
    return ts;
}

void write_report(const std::string& dir, const Environment& env, const RunReport& report) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream f(dir + "/report.jsonl");
        if (!f) throw std::runtime_error("write_report: cannot open " + dir + "/report.jsonl");
        for (const auto& q : report.queries) {
            nlohmann::ordered_json j;
            j["t"] = q.t;
            j["domain"] = q.domain_id;
            j["decision"] = decision_to_json(q.decision);
            j["hijack"] = {{"1", topk_hits(q.decision, env.adv_ids, 1)},
                           {"2", topk_hits(q.decision, env.adv_ids, 2)},
                           {"3", topk_hits(q.decision, env.adv_ids, 3)}};
            if (!q.feedback.empty()) {
                nlohmann::ordered_json fb;
                for (const auto& [id, f] : q.feedback) {
                    nlohmann::ordered_json e;
                    if (f.rel_valid) e["rel"] = f.f_rel;
                    if (f.cons_valid) e["cons"] = f.f_cons;
                    if (f.agr_valid) e["agr"] = f.f_agr;
                    fb[id] = e;
                }
                j["feedback"] = fb;
            }
            f << j.dump() << "\n";
        }
    }

    {
        const Aggregates all = aggregate(report.queries, env);
        const SplitReport sr = split_early_post(report, env, env.cfg.tasr.warmup);
        std::ofstream f(dir + "/summary.csv");
        f << "n_queries,hr1,hr2,hr3,acc1,acc3,malrank,margin,"
             "early_hr1,early_acc1,post_hr1,post_acc1,burned_hr1,burned_acc1\n";
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%zu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.6f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                      all.n_queries, all.hr1, all.hr2, all.hr3, all.acc1, all.acc3,
                      all.malrank, all.margin, sr.early ? sr.early->hr1 : 0.0,
                      sr.early ? sr.early->acc1 : 0.0, sr.post.hr1, sr.post.acc1,
                      sr.post_burned.hr1, sr.post_burned.acc1);
        f << buf;
    }

    {
        std::ofstream f(dir + "/trust.json");
        f << trust_to_json(report.final_trust).dump(2) << "\n";
    }

    {
        const TimingStats ts = timing_stats(report);
        nlohmann::ordered_json j;
        j["per_query_ms"] = {{"mean", ts.mean_ms}, {"p95", ts.p95_ms}};
        std::ofstream f(dir + "/timing.json");
        f << j.dump(2) << "\n";
    }
}

}  // namespace fedroute
