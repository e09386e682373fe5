// Benchmarks the OpenMP scoring kernels against the serial reference paths
// and verifies that both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "fedroute/kernels.hpp"
#include "fedroute/profile.hpp"
#include "fedroute/rng.hpp"
#include "fedroute/vec.hpp"

using namespace fedroute;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = rng.gaussian();
    return normalize(v);
}

}  // namespace

int main() {
    constexpr std::size_t dim = 256;
    constexpr std::size_t n_profiles = 400;
    constexpr std::size_t centroids_per = 8;
    constexpr std::size_t corpus_size = 200000;
    constexpr std::size_t reps = 20;

    Rng rng(42);
    std::vector<ClientProfile> profiles(n_profiles);
    for (std::size_t i = 0; i < n_profiles; ++i) {
        profiles[i].client_id = "c" + std::to_string(i);
        profiles[i].kind = ProfileKind::kmeans;
        for (std::size_t c = 0; c < centroids_per; ++c)
            profiles[i].centroids.push_back(random_unit(rng, dim));
    }
    std::vector<DocumentRecord> corpus(corpus_size);
    for (std::size_t i = 0; i < corpus_size; ++i) {
        corpus[i].doc_id = "doc" + std::to_string(i);
        corpus[i].domain_id = "d0";
        corpus[i].embedding = random_unit(rng, dim);
    }
    const Vec query = random_unit(rng, dim);

    // --- score_profiles ---
    std::vector<double> serial_scores, parallel_scores;
    auto t0 = Clock::now();
    for (std::size_t r = 0; r < reps; ++r)
        serial_scores = score_profiles(query, profiles, Aggregation::max, Exec::serial);
    const double sp_serial = ms_since(t0) / reps;
    t0 = Clock::now();
    for (std::size_t r = 0; r < reps; ++r)
        parallel_scores = score_profiles(query, profiles, Aggregation::max, Exec::parallel);
    const double sp_parallel = ms_since(t0) / reps;
    bool sp_match = serial_scores == parallel_scores;

    // --- top_m_by_cosine ---
    std::vector<std::size_t> serial_top, parallel_top;
    t0 = Clock::now();
    for (std::size_t r = 0; r < reps; ++r)
        serial_top = top_m_by_cosine(query, corpus, 5, Exec::serial);
    const double tm_serial = ms_since(t0) / reps;
    t0 = Clock::now();
    for (std::size_t r = 0; r < reps; ++r)
        parallel_top = top_m_by_cosine(query, corpus, 5, Exec::parallel);
    const double tm_parallel = ms_since(t0) / reps;
    bool tm_match = serial_top == parallel_top;

    std::printf("kernel            serial_ms  parallel_ms  speedup  identical\n");
    std::printf("score_profiles    %9.3f  %11.3f  %7.2fx  %s\n", sp_serial, sp_parallel,
                sp_serial / sp_parallel, sp_match ? "yes" : "NO");
    std::printf("top_m_by_cosine   %9.3f  %11.3f  %7.2fx  %s\n", tm_serial, tm_parallel,
                tm_serial / tm_parallel, tm_match ? "yes" : "NO");
    return (sp_match && tm_match) ? 0 : 1;
}
