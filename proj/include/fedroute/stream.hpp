#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedroute/scenario.hpp"
#include "fedroute/tasr.hpp"

namespace fedroute {

struct QueryRecord {
    std::size_t t = 0;  // 1-based stream position
    std::string domain_id;
    RoutingDecision decision;
    std::map<std::string, Feedback> feedback;  // selected clients, TASR runs only
    double wall_ms = 0.0;  // routing + feedback + update; not part of the report bytes
};

struct RunReport {
    std::vector<QueryRecord> queries;
    TrustRegistry final_trust;
};

// Runs queries start_t+1 .. end_t of the stream (defaults: the whole stream).
// `resume_trust` restores a mid-stream trust snapshot; query generation is
// position-seeded, so a resumed run is identical to an uninterrupted one.
RunReport run_stream(const Environment& env, std::size_t start_t = 0,
                     const TrustRegistry* resume_trust = nullptr,
                     std::size_t end_t = 0);

// ---- Metrics ----

// Percentage of queries whose top-k intersects the adversary set.
double metric_hr_at_k(const std::vector<QueryRecord>& queries,
                      const std::set<std::string>& adv_ids, std::size_t k);

// Percentage of queries whose top-k contains an honest client holding the
// query's domain. Throws if a query domain is missing from the map.
double metric_acc_at_k(const std::vector<QueryRecord>& queries,
                       const std::map<std::string, std::set<std::string>>& holders,
                       std::size_t k);

// Mean best (lowest, 1-based) malicious rank over the full ranked list.
double metric_malrank(const std::vector<QueryRecord>& queries,
                      const std::set<std::string>& adv_ids);

struct Aggregates {
    std::size_t n_queries = 0;
    double hr1 = 0, hr2 = 0, hr3 = 0;
    double acc1 = 0, acc3 = 0;
    double malrank = 0;
    double margin = 0;  // mean best-malicious minus best-honest-target score
};

Aggregates aggregate(const std::vector<QueryRecord>& queries, const Environment& env);

struct SplitReport {
    std::optional<Aggregates> early;  // t <= W; empty when W = 0
    Aggregates post;                  // t > W
    Aggregates post_burned;           // t > W + burn_in
};

SplitReport split_early_post(const RunReport& report, const Environment& env,
                             std::size_t warmup);

struct TimingStats {
    double mean_ms = 0.0;
    double p95_ms = 0.0;
};
TimingStats timing_stats(const RunReport& report);

// Writes report.jsonl, summary.csv, trust.json, timing.json into `dir`.
// Wall-clock data goes only to timing.json.
void write_report(const std::string& dir, const Environment& env, const RunReport& report);

}  // namespace fedroute
