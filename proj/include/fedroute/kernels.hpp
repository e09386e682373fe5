#pragma once

#include <cstddef>
#include <vector>

#include "fedroute/profile.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

// Execution policy for the data-parallel kernels. Every kernel has a serial
// reference path and an OpenMP path that must produce bit-identical output:
// each output slot is computed independently, with no reordered reductions.
enum class Exec { serial, parallel };

// Global default used by the harness; tests pin it explicitly.
Exec default_exec();
void set_default_exec(Exec e);

enum class Aggregation { max, mean };

// Per-profile routing score: max (or mean) cosine over the profile's centroids.
double score_cosine(const Vec& query, const ClientProfile& profile,
                    Aggregation agg = Aggregation::max);

// Scores for every profile, in input order.
std::vector<double> score_profiles(const Vec& query,
                                   const std::vector<ClientProfile>& profiles,
                                   Aggregation agg, Exec exec);

// Indices of the top-m corpus documents by cosine to the query, similarity
// descending, ties broken by ascending index. m >= corpus size returns all.
std::vector<std::size_t> top_m_by_cosine(const Vec& query,
                                         const std::vector<DocumentRecord>& corpus,
                                         std::size_t m, Exec exec);

}  // namespace fedroute
