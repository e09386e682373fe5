#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedroute/profile.hpp"
#include "fedroute/rng.hpp"
#include "fedroute/vec.hpp"

using namespace fedroute;

namespace {

DocumentRecord doc(std::string id, Vec e) { return {std::move(id), "d0", std::move(e)}; }

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = rng.gaussian();
    return normalize(v);
}

// Exact k-means for k = 2 by enumerating every 2-partition of the docs and
// taking the assignment with minimal within-cluster sum of squares.
std::vector<Vec> exact_kmeans2(const std::vector<DocumentRecord>& docs) {
    const std::size_t n = docs.size();
    double best = 1e300;
    std::vector<Vec> best_centroids;
    for (std::size_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
        std::vector<Vec> mean(2, Vec(docs[0].embedding.size(), 0.0));
        std::vector<std::size_t> cnt(2, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = (mask >> i) & 1;
            ++cnt[c];
            for (std::size_t j = 0; j < mean[c].size(); ++j)
                mean[c][j] += docs[i].embedding[j];
        }
        if (cnt[0] == 0 || cnt[1] == 0) continue;
        for (std::size_t c = 0; c < 2; ++c)
            for (auto& x : mean[c]) x /= static_cast<double>(cnt[c]);
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = (mask >> i) & 1;
            for (std::size_t j = 0; j < mean[c].size(); ++j) {
                const double d = docs[i].embedding[j] - mean[c][j];
                wcss += d * d;
            }
        }
        if (wcss < best) {
            best = wcss;
            best_centroids = mean;
        }
    }
    return best_centroids;
}

}  // namespace

TEST_CASE("profile_mean basics") {
    auto p = profile_mean({doc("a", {1, 0}), doc("b", {0, 1})}, "c");
    REQUIRE(p.centroids.size() == 1);
    CHECK(p.kind == ProfileKind::mean);
    CHECK(p.centroids[0][0] == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(p.centroids[0][1] == doctest::Approx(0.70710678).epsilon(1e-8));

    auto single = profile_mean({doc("a", {1, 0})}, "c");
    CHECK(single.centroids[0] == Vec{1, 0});

    CHECK_THROWS(profile_mean({}, "c"));
    CHECK_THROWS(profile_mean({doc("a", {1, 0}), doc("b", {-1, 0})}, "c"));
}

TEST_CASE("profile_kmeans recovers two tight clusters (exact oracle)") {
    Rng rng(17);
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 4; ++i) {
        Vec a = {1, 0}, b = {0, 1};
        a[1] += 0.02 * rng.gaussian();
        b[0] += 0.02 * rng.gaussian();
        docs.push_back(doc("a" + std::to_string(i), normalize(a)));
        docs.push_back(doc("b" + std::to_string(i), normalize(b)));
    }
    KMeansConfig cfg;
    cfg.k = 2;
    cfg.seed = 4;
    const auto p = profile_kmeans(docs, cfg, "c");
    REQUIRE(p.centroids.size() == 2);
    CHECK(p.kind == ProfileKind::kmeans);

    const auto oracle = exact_kmeans2(docs);
    REQUIRE(oracle.size() == 2);
    // Match our (renormalized) centroids to the exact optimum, either order.
    auto match = [&](const Vec& c) {
        return std::max(cosine(c, oracle[0]), cosine(c, oracle[1]));
    };
    CHECK(match(p.centroids[0]) >= 0.9999);
    CHECK(match(p.centroids[1]) >= 0.9999);
    CHECK(std::max(cosine(p.centroids[0], {1, 0}), cosine(p.centroids[0], {0, 1})) >= 0.999);
    CHECK(std::max(cosine(p.centroids[1], {1, 0}), cosine(p.centroids[1], {0, 1})) >= 0.999);
}

TEST_CASE("profile_kmeans degenerate shapes") {
    std::vector<DocumentRecord> same = {doc("a", {0, 1}), doc("b", {0, 1}), doc("c", {0, 1})};
    KMeansConfig cfg;
    cfg.k = 1;
    auto p = profile_kmeans(same, cfg, "c");
    REQUIRE(p.centroids.size() == 1);
    CHECK(cosine(p.centroids[0], {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<DocumentRecord> three = {doc("a", {1, 0, 0}), doc("b", {0, 1, 0}),
                                         doc("c", {0, 0, 1})};
    cfg.k = 3;
    p = profile_kmeans(three, cfg, "c");
    REQUIRE(p.centroids.size() == 3);
    for (const auto& d : three) {
        bool found = false;
        for (const auto& c : p.centroids)
            if (cosine(c, d.embedding) > 1.0 - 1e-9) found = true;
        CHECK(found);
    }

    cfg.k = 4;
    CHECK_THROWS(profile_kmeans(three, cfg, "c"));
}

TEST_CASE("lloyd iterations never increase WCSS") {
    Rng rng(23);
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 60; ++i) docs.push_back(doc("d" + std::to_string(i), random_unit(rng, 12)));
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        KMeansConfig cfg;
        cfg.k = 5;
        cfg.seed = seed;
        std::vector<double> trace;
        profile_kmeans(docs, cfg, "c", &trace);
        REQUIRE(!trace.empty());
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("profile_kmeans determinism and zero-spread collapse") {
    Rng rng(31);
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 40; ++i) docs.push_back(doc("d" + std::to_string(i), random_unit(rng, 8)));
    KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 9;
    const auto a = profile_kmeans(docs, cfg, "c");
    const auto b = profile_kmeans(docs, cfg, "c");
    CHECK(a.centroids == b.centroids);

    // Zero-spread corpus: every profiling method lands on the mean direction.
    DomainSpec spec{"d0", normalize({1, 2, 2, 0}), 0.0, 3};
    const auto flat = synth_corpus(spec, 12);
    const auto pm = profile_mean(flat, "c");
    CHECK(cosine(pm.centroids[0], spec.mean_direction) == doctest::Approx(1.0).epsilon(1e-9));
    cfg.k = 3;
    const auto pk = profile_kmeans(flat, cfg, "c");
    for (const auto& c : pk.centroids)
        CHECK(cosine(c, spec.mean_direction) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("profile JSON round trip") {
    ClientProfile p;
    p.client_id = "h03";
    p.kind = ProfileKind::kmeans;
    p.declared_domain = "d2";
    p.centroids = {normalize({1, 2, 3}), normalize({-1, 0.5, 0})};
    const auto j = profile_to_json(p);
    const auto q = profile_from_json(j);
    CHECK(q.client_id == p.client_id);
    CHECK(q.kind == p.kind);
    CHECK(q.declared_domain == p.declared_domain);
    CHECK(q.centroids == p.centroids);
}
