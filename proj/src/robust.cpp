#include "fedroute/robust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedroute {

Vec flatten_profile(const ClientProfile& p) {
    if (p.centroids.empty())
        throw std::invalid_argument("flatten_profile: no centroids");
    Vec mean(p.centroids.front().size(), 0.0);
    for (const auto& c : p.centroids)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += c[i];
    for (auto& x : mean) x /= static_cast<double>(p.centroids.size());
    return normalize(mean);
}

KrumResult krum_filter(const std::vector<ClientProfile>& profiles, std::size_t f) {
    const std::size_t n = profiles.size();
    if (n < f + 3)
        throw std::invalid_argument("krum_filter: need n >= f + 3, got n=" +
                                    std::to_string(n) + " f=" + std::to_string(f));
    std::vector<Vec> flat(n);
    for (std::size_t i = 0; i < n; ++i) flat[i] = flatten_profile(profiles[i]);

    const std::size_t nearest = n - f - 2;
    KrumResult res;
    res.scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> d2;
        d2.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < flat[i].size(); ++c) {
                const double d = flat[i][c] - flat[j][c];
                s += d * d;
            }
            d2.push_back(s);
        }
        std::sort(d2.begin(), d2.end());
        double score = 0.0;
        for (std::size_t k = 0; k < nearest && k < d2.size(); ++k) score += d2[k];
        res.scores.emplace_back(profiles[i].client_id, score);
    }

    // f highest scores; ties broken by ascending client id.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (res.scores[a].second != res.scores[b].second)
            return res.scores[a].second > res.scores[b].second;
        return res.scores[a].first < res.scores[b].first;
    });
    for (std::size_t i = 0; i < f; ++i) res.flagged.push_back(res.scores[idx[i]].first);
    std::sort(res.flagged.begin(), res.flagged.end());
    return res;
}

namespace {

double sorted_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];  // lower median for even counts
}

// Coordinate-wise defenses work on the raw centroid mean, without the unit
// renormalization Krum distances use: the reference itself need not be a
// unit vector, and degenerate (zero) profiles are still well-defined inputs.
Vec flatten_raw(const ClientProfile& p) {
    if (p.centroids.empty())
        throw std::invalid_argument("flatten_raw: no centroids");
    Vec mean(p.centroids.front().size(), 0.0);
    for (const auto& c : p.centroids)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += c[i];
    for (auto& x : mean) x /= static_cast<double>(p.centroids.size());
    return mean;
}

}  // namespace

RobustReference coordinate_reference(const std::vector<ClientProfile>& profiles,
                                     RobustMethod method, double trim_fraction) {
    if (profiles.empty())
        throw std::invalid_argument("coordinate_reference: no profiles");
    if (trim_fraction < 0.0 || trim_fraction >= 0.5)
        throw std::invalid_argument("coordinate_reference: trim_fraction must be in [0, 0.5)");
    const std::size_t n = profiles.size();
    std::vector<Vec> flat(n);
    for (std::size_t i = 0; i < n; ++i) flat[i] = flatten_raw(profiles[i]);
    const std::size_t dim = flat.front().size();

    RobustReference ref;
    ref.method = method;
    ref.trim_fraction = trim_fraction;
    ref.reference.resize(dim);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = flat[i][j];
        if (method == RobustMethod::median) {
            ref.reference[j] = sorted_median(col);
        } else {
            std::sort(col.begin(), col.end());
            const std::size_t trim =
                static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));
            if (2 * trim >= n)
                throw std::invalid_argument("coordinate_reference: trim removes all values");
            double s = 0.0;
            for (std::size_t i = trim; i < n - trim; ++i) s += col[i];
            ref.reference[j] = s / static_cast<double>(n - 2 * trim);
        }
    }
    return ref;
}

std::vector<ClientProfile> clip_to_reference(const std::vector<ClientProfile>& profiles,
                                             const RobustReference& ref,
                                             double radius_multiplier) {
    if (radius_multiplier <= 0.0)
        throw std::invalid_argument("clip_to_reference: radius_multiplier must be > 0");
    constexpr double mad_floor = 1e-9;
    const std::size_t n = profiles.size();
    std::vector<Vec> flat(n);
    for (std::size_t i = 0; i < n; ++i) flat[i] = flatten_raw(profiles[i]);
    const std::size_t dim = ref.reference.size();

    // Per-coordinate MAD about the reference.
    std::vector<double> radius(dim);
    std::vector<double> dev(n);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(flat[i][j] - ref.reference[j]);
        radius[j] = radius_multiplier * std::max(sorted_median(dev), mad_floor);
    }

    std::vector<ClientProfile> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec v = flat[i];
        for (std::size_t j = 0; j < dim; ++j)
            v[j] = std::clamp(v[j], ref.reference[j] - radius[j], ref.reference[j] + radius[j]);
        ClientProfile p = profiles[i];
        p.centroids = {normalize(v)};
        out.push_back(std::move(p));
    }
    return out;
}

bool he_surrogate_check(const ScoreMap& scores, std::size_t k,
                        const std::function<double(double)>& transform) {
    const auto plain = route_topk(scores, k);
    ScoreMap mapped;
    for (const auto& [id, s] : scores) mapped[id] = transform(s);
    const auto enc = route_topk(mapped, k);
    return plain.top_k == enc.top_k;
}

}  // namespace fedroute
