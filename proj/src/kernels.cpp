#include "fedroute/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fedroute {

namespace {
Exec g_default_exec = Exec::parallel;
}

Exec default_exec() { return g_default_exec; }
void set_default_exec(Exec e) { g_default_exec = e; }

double score_cosine(const Vec& query, const ClientProfile& profile, Aggregation agg) {
    if (profile.centroids.empty())
        throw std::invalid_argument("score_cosine: profile has no centroids");
    if (agg == Aggregation::max) {
        double best = -1.0;
        for (const auto& c : profile.centroids) best = std::max(best, cosine(query, c));
        return best;
    }
    double sum = 0.0;
    for (const auto& c : profile.centroids) sum += cosine(query, c);
    return sum / static_cast<double>(profile.centroids.size());
}

std::vector<double> score_profiles(const Vec& query,
                                   const std::vector<ClientProfile>& profiles,
                                   Aggregation agg, Exec exec) {
    std::vector<double> out(profiles.size());
    const std::int64_t n = static_cast<std::int64_t>(profiles.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = score_cosine(query, profiles[i], agg);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = score_cosine(query, profiles[i], agg);
    }
    return out;
}

std::vector<std::size_t> top_m_by_cosine(const Vec& query,
                                         const std::vector<DocumentRecord>& corpus,
                                         std::size_t m, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(corpus.size());
    std::vector<double> sims(corpus.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            sims[i] = cosine(query, corpus[i].embedding);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            sims[i] = cosine(query, corpus[i].embedding);
    }
    std::vector<std::size_t> idx(corpus.size());
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t take = std::min(m, corpus.size());
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (sims[a] != sims[b]) return sims[a] > sims[b];
                          return a < b;
                      });
    idx.resize(take);
    return idx;
}

}  // namespace fedroute
