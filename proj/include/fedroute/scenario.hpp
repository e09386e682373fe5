#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedroute/adversary.hpp"
#include "fedroute/config.hpp"
#include "fedroute/kernels.hpp"
#include "fedroute/profile.hpp"
#include "fedroute/router.hpp"
#include "fedroute/tasr.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

enum class Topology { single_domain, multi_domain };
enum class ProfileMethod { mean, kmeans };
enum class RouterKind { cosine, neural };
enum class DefenseKind { none, krum, median, trimmed_mean, tasr_rel, tasr_rel_cons, tasr_full };

std::string to_string(DefenseKind k);
bool defense_is_tasr(DefenseKind k);

struct ScenarioConfig {
    // [space]
    std::size_t dim = 64;
    std::size_t n_domains = 10;
    std::uint64_t domain_seed = 7;
    double spread = 0.35;
    std::size_t target_domain = 0;

    // [clients]
    std::size_t n_honest = 20;
    Topology topology = Topology::multi_domain;
    std::size_t domains_per_client = 6;
    std::size_t docs_per_domain = 30;
    ProfileMethod profile_method = ProfileMethod::kmeans;
    KMeansConfig kmeans;  // seed filled per client at build time

    // [attack]
    AttackConfig attack;
    std::size_t true_corpus_size = 60;

    // [router]
    RouterKind router = RouterKind::cosine;
    Aggregation aggregation = Aggregation::max;
    NeuralTrainConfig neural;
    std::size_t neural_pairs = 2000;

    // [defense]
    DefenseKind defense = DefenseKind::none;
    std::size_t krum_f = 3;
    double trim_fraction = 0.1;
    double radius_multiplier = 3.0;

    // [tasr]
    TasrConfig tasr;

    // [stream]
    std::size_t stream_length = 500;
    std::size_t k_route = 3;
    double target_query_fraction = 1.0;
    double query_spread = 0.1;
    std::size_t post_burn_in = 25;
    std::uint64_t master_seed = 1;

    static ScenarioConfig from_map(const ConfigMap& m);
    void validate() const;
};

struct HonestClient {
    std::string id;
    std::vector<DocumentRecord> corpus;
    ClientProfile profile;  // as uploaded (pre-defense)
    std::set<std::string> domains;
};

struct Environment {
    ScenarioConfig cfg;
    std::vector<DomainSpec> domains;  // index = domain number, id "d<i>"
    std::vector<HonestClient> honest;
    std::vector<MaliciousClient> malicious;
    // Profiles the router actually scores (after clip defenses), keyed by id.
    std::map<std::string, ClientProfile> registered;
    std::set<std::string> excluded;  // krum-flagged, not routed
    std::set<std::string> adv_ids;
    std::map<std::string, std::set<std::string>> domain_holders;  // honest target map
    std::optional<NeuralRouterModel> neural_model;

    const std::string& target_domain_id() const { return domains[cfg.target_domain].domain_id; }
    // Stable hash of the registered profiles and exclusions.
    std::uint64_t digest() const;
};

Environment build_scenario(const ScenarioConfig& cfg);

// Query for stream position t (1-based), derived only from (config, t).
struct StreamQuery {
    std::string query_id;
    std::string domain_id;
    Vec embedding;
};
StreamQuery sample_query(const Environment& env, std::size_t t);

}  // namespace fedroute
