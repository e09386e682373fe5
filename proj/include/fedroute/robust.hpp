#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fedroute/profile.hpp"
#include "fedroute/router.hpp"
#include "fedroute/vec.hpp"

namespace fedroute {

struct KrumResult {
    // (client_id, krum score), input order. Score = sum of squared distances
    // to the n - f - 2 nearest other profiles.
    std::vector<std::pair<std::string, double>> scores;
    std::vector<std::string> flagged;  // f highest scores, ties by ascending id
};

// Multi-centroid profiles are flattened to their normalized mean centroid.
Vec flatten_profile(const ClientProfile& p);

KrumResult krum_filter(const std::vector<ClientProfile>& profiles, std::size_t f);

enum class RobustMethod { median, trimmed_mean };

struct RobustReference {
    Vec reference;
    RobustMethod method = RobustMethod::median;
    double trim_fraction = 0.0;
};

RobustReference coordinate_reference(const std::vector<ClientProfile>& profiles,
                                     RobustMethod method, double trim_fraction = 0.0);

// MAD-band clipping: coordinate j is clipped into [ref_j - r_j, ref_j + r_j]
// with r_j = radius_multiplier * MAD_j (MAD floored at 1e-9), then the
// flattened vector is renormalized. Output profiles are single-centroid.
std::vector<ClientProfile> clip_to_reference(const std::vector<ClientProfile>& profiles,
                                             const RobustReference& ref,
                                             double radius_multiplier);

// True iff applying the transform to every score leaves the top-k set
// unchanged. This is the ranking-invariance property encrypted similarity
// search relies on.
bool he_surrogate_check(const ScoreMap& scores, std::size_t k,
                        const std::function<double(double)>& transform);

}  // namespace fedroute
