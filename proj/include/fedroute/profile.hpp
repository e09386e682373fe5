#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedroute/vec.hpp"

namespace fedroute {

enum class ProfileKind { mean, kmeans, random, forged_centroid };

std::string to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

// The uploaded semantic profile of one client: one or more unit centroids.
struct ClientProfile {
    std::string client_id;
    std::vector<Vec> centroids;
    ProfileKind kind = ProfileKind::mean;
    std::string declared_domain;  // empty = undeclared
};

struct KMeansConfig {
    std::size_t k = 5;
    std::size_t max_iters = 100;
    double tol = 1e-6;  // centroid-shift stopping threshold
    std::uint64_t seed = 0;
};

// Single-centroid profile: normalized arithmetic mean of the embeddings.
ClientProfile profile_mean(const std::vector<DocumentRecord>& docs,
                           const std::string& client_id);

// Lloyd's algorithm with k-means++ seeding; deterministic under cfg.seed.
// Centroids are renormalized to unit norm after convergence. Empty clusters
// are re-seeded to the point farthest from its assigned centroid.
// wcss_trace, when given, receives the within-cluster sum of squares after
// every assignment step.
ClientProfile profile_kmeans(const std::vector<DocumentRecord>& docs,
                             const KMeansConfig& cfg,
                             const std::string& client_id,
                             std::vector<double>* wcss_trace = nullptr);

nlohmann::ordered_json profile_to_json(const ClientProfile& p);
ClientProfile profile_from_json(const nlohmann::json& j);

}  // namespace fedroute
