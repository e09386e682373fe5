#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedroute/kernels.hpp"
#include "fedroute/profile.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

enum class AttackKind { forged_centroid, random, stealth_poison };

std::string to_string(AttackKind k);
AttackKind attack_kind_from_string(const std::string& s);

struct AttackConfig {
    std::size_t n_adv = 3;
    std::size_t proxy_size = 100;
    double target_fraction = 1.0;  // alpha: target-domain share of the proxy set
    AttackKind kind = AttackKind::forged_centroid;
    std::uint64_t seed = 0;
    bool perturb_copies = false;     // small per-copy noise instead of identical uploads
    double stealth_angle_deg = 30.0; // related-domain angle for stealth poisoning
    bool forge_kmeans = false;       // forge via the k-means profiling pipeline
};

struct MaliciousClient {
    std::string client_id;
    ClientProfile uploaded_profile;
    std::vector<DocumentRecord> true_corpus;  // what it can actually serve
};

// round(alpha*size) docs from the target pool, the rest from the non-target
// pool, without replacement, deterministic under seed.
std::vector<DocumentRecord> sample_proxy(const std::vector<DocumentRecord>& target_pool,
                                         const std::vector<DocumentRecord>& nontarget_pool,
                                         std::size_t size, double alpha,
                                         std::uint64_t seed);

// Normalized mean of the proxy embeddings (single centroid), or the k-means
// profile of the proxy set when kmeans_cfg is given.
ClientProfile forge_centroid_profile(const std::vector<DocumentRecord>& proxy,
                                     const std::string& client_id,
                                     const std::optional<KMeansConfig>& kmeans_cfg = std::nullopt);

// Single unit centroid uniform on the sphere, deterministic under seed.
ClientProfile forge_random_profile(std::size_t dim, std::uint64_t seed,
                                   const std::string& client_id);

// Top-m documents of the client's true corpus by cosine to the query; a
// short corpus returns everything in similarity order.
std::vector<DocumentRecord> malicious_evidence(const MaliciousClient& client,
                                               const Vec& query, std::size_t m,
                                               Exec exec);

}  // namespace fedroute
