#include <doctest.h>

#include <vector>

#include "fedroute/kernels.hpp"
#include "fedroute/rng.hpp"

using namespace fedroute;

namespace {

ClientProfile make_profile(std::string id, std::vector<Vec> cs) {
    ClientProfile p;
    p.client_id = std::move(id);
    p.centroids = std::move(cs);
    return p;
}

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = rng.gaussian();
    return normalize(v);
}

}  // namespace

TEST_CASE("score_cosine basics") {
    CHECK(score_cosine({1, 0}, make_profile("a", {{1, 0}})) == doctest::Approx(1.0));
    CHECK(score_cosine({1, 0}, make_profile("a", {{0, 1}, normalize({1, 1})})) ==
          doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(score_cosine({1, 0}, make_profile("a", {{-1, 0}})) == doctest::Approx(-1.0));
}

TEST_CASE("score_cosine ignores duplicate centroids") {
    Rng rng(7);
    const Vec q = random_unit(rng, 16);
    const Vec c1 = random_unit(rng, 16), c2 = random_unit(rng, 16);
    const double base = score_cosine(q, make_profile("a", {c1, c2}));
    CHECK(score_cosine(q, make_profile("a", {c1, c2, c1, c2, c2})) ==
          doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("mean aggregation averages over centroids") {
    const double s =
        score_cosine({1, 0}, make_profile("a", {{1, 0}, {0, 1}}), Aggregation::mean);
    CHECK(s == doctest::Approx(0.5));
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    Rng rng(55);
    std::vector<ClientProfile> profiles;
    for (int i = 0; i < 37; ++i) {
        std::vector<Vec> cs;
        for (int c = 0; c < 1 + i % 5; ++c) cs.push_back(random_unit(rng, 24));
        profiles.push_back(make_profile("c" + std::to_string(i), std::move(cs)));
    }
    std::vector<DocumentRecord> corpus;
    for (int i = 0; i < 501; ++i)
        corpus.push_back({"doc" + std::to_string(i), "d0", random_unit(rng, 24)});

    for (int rep = 0; rep < 5; ++rep) {
        const Vec q = random_unit(rng, 24);
        CHECK(score_profiles(q, profiles, Aggregation::max, Exec::serial) ==
              score_profiles(q, profiles, Aggregation::max, Exec::parallel));
        CHECK(score_profiles(q, profiles, Aggregation::mean, Exec::serial) ==
              score_profiles(q, profiles, Aggregation::mean, Exec::parallel));
        CHECK(top_m_by_cosine(q, corpus, 7, Exec::serial) ==
              top_m_by_cosine(q, corpus, 7, Exec::parallel));
    }
}

TEST_CASE("top_m_by_cosine ordering and boundary behavior") {
    std::vector<DocumentRecord> corpus = {
        {"a", "d0", {0, 1}},
        {"b", "d0", {1, 0}},                // exact hit, index 1
        {"c", "d0", normalize({1, 1})},
        {"d", "d0", {1, 0}},                // tie with b, higher index
    };
    const auto top = top_m_by_cosine({1, 0}, corpus, 3, Exec::serial);
    REQUIRE(top.size() == 3);
    CHECK(top[0] == 1);  // tie with index 3 broken by ascending index
    CHECK(top[1] == 3);
    CHECK(top[2] == 2);

    const auto all = top_m_by_cosine({1, 0}, corpus, 99, Exec::serial);
    CHECK(all.size() == corpus.size());
}

TEST_CASE("default exec is switchable") {
    const Exec before = default_exec();
    set_default_exec(Exec::serial);
    CHECK(default_exec() == Exec::serial);
    set_default_exec(before);
    CHECK(default_exec() == before);
}
