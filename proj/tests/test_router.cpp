#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedroute/rng.hpp"
#include "fedroute/router.hpp"
#include "fedroute/vec.hpp"

using namespace fedroute;

namespace {

Vec random_unit(Rng& rng, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = rng.gaussian();
    return normalize(v);
}

ScoreMap random_scores(Rng& rng, std::size_t n) {
    ScoreMap s;
    for (std::size_t i = 0; i < n; ++i)
        s["c" + std::to_string(i)] = 2.0 * rng.uniform() - 1.0;
    return s;
}

// Separable corpus: queries near one of two directions, profiles at the
// directions; label 1 iff the query and profile share a direction.
std::vector<TrainPair> separable_pairs(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const Vec d0 = random_unit(rng, 16), d1 = random_unit(rng, 16);
    ClientProfile p0, p1;
    p0.client_id = "p0";
    p0.centroids = {d0};
    p1.client_id = "p1";
    p1.centroids = {d1};
    std::vector<TrainPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const bool from0 = rng.uniform() < 0.5;
        Vec q = from0 ? d0 : d1;
        for (auto& x : q) x += 0.15 * rng.gaussian();
        q = normalize(q);
        const bool to0 = rng.uniform() < 0.5;
        pairs.push_back({q, to0 ? p0 : p1, (from0 == to0) ? 1 : 0});
    }
    return pairs;
}

double pair_accuracy(const NeuralRouterModel& m, const std::vector<TrainPair>& pairs) {
    std::size_t hit = 0;
    for (const auto& p : pairs)
        if ((score_neural(m, p.query, p.profile) >= 0.5) == (p.label == 1)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(pairs.size());
}

}  // namespace

TEST_CASE("route_topk basics") {
    const ScoreMap s = {{"a", 0.9}, {"b", 0.5}, {"c", 0.1}};
    auto d = route_topk(s, 2, "q");
    CHECK(d.top_k == std::vector<std::string>{"a", "b"});
    CHECK(d.ranked.size() == 3);
    CHECK(d.k == 2);

    auto tie = route_topk({{"a", 0.5}, {"b", 0.5}}, 1);
    CHECK(tie.top_k == std::vector<std::string>{"a"});

    auto full = route_topk(s, 3);
    CHECK(full.top_k.size() == 3);

    CHECK_THROWS(route_topk(s, 0));
    CHECK_THROWS(route_topk(s, 4));
}

TEST_CASE("normalize_scores endpoints, constants, order") {
    const auto n = normalize_scores({{"a", -1.0}, {"b", 0.0}, {"c", 1.0}});
    CHECK(n.at("a") == doctest::Approx(1e-6 / 2.000001).epsilon(1e-9));
    CHECK(n.at("b") == doctest::Approx(1.000001 / 2.000001).epsilon(1e-9));
    CHECK(n.at("c") == doctest::Approx(1.0));
    CHECK(n.at("a") < n.at("b"));
    CHECK(n.at("b") < n.at("c"));

    const auto flat = normalize_scores({{"a", 0.3}, {"b", 0.3}});
    CHECK(flat.at("a") == doctest::Approx(1.0));
    CHECK(flat.at("b") == doctest::Approx(1.0));

    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const ScoreMap s = random_scores(rng, 9);
        const ScoreMap ns = normalize_scores(s);
        for (const auto& [id, v] : ns) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
        for (const auto& [i, si] : s)
            for (const auto& [j, sj] : s)
                if (si < sj) CHECK(ns.at(i) < ns.at(j));
        auto order = [](const RoutingDecision& d) {
            std::vector<std::string> ids;
            for (const auto& [id, v] : d.ranked) ids.push_back(id);
            return ids;
        };
        CHECK(order(route_topk(s, 3)) == order(route_topk(ns, 3)));
    }
}

TEST_CASE("top-k set is invariant under strictly increasing transforms") {
    Rng rng(99);
    const std::vector<std::function<double(double)>> transforms = {
        [](double x) { return 3.0 * x + 2.0; },
        [](double x) { return x * x * x; },
        [](double x) { return std::exp(x); },
        [](double x) { return std::atan(x); },
        [](double x) { return x + 0.1 * std::tanh(x); },
    };
    for (int rep = 0; rep < 100; ++rep) {
        const ScoreMap s = random_scores(rng, 11);
        for (const auto& f : transforms) {
            ScoreMap fs;
            for (const auto& [id, v] : s) fs[id] = f(v);
            for (std::size_t k : {1, 2, 3})
                CHECK(route_topk(s, k).top_k == route_topk(fs, k).top_k);
        }
    }
}

TEST_CASE("neural router trains on separable pairs") {
    auto pairs = separable_pairs(2000, 61);
    const std::size_t held = pairs.size() / 5;
    std::vector<TrainPair> test(pairs.end() - held, pairs.end());
    pairs.resize(pairs.size() - held);

    NeuralTrainConfig cfg;
    cfg.seed = 5;
    const auto res = train_neural_router(pairs, cfg);
    CHECK(res.train_accuracy >= 0.95);
    CHECK(pair_accuracy(res.model, test) >= 0.95);

    // Matched pairs outscore mismatched pairs on the held-out split.
    double pos = 0, neg = 0;
    std::size_t np = 0, nn = 0;
    for (const auto& p : test) {
        const double s = score_neural(res.model, p.query, p.profile);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        if (p.label) { pos += s; ++np; } else { neg += s; ++nn; }
    }
    REQUIRE(np > 0);
    REQUIRE(nn > 0);
    CHECK(pos / np > neg / nn);

    const auto res2 = train_neural_router(pairs, cfg);
    CHECK(res2.model.w1 == res.model.w1);  // bit-identical under the same seed
    CHECK(res2.model.w2 == res.model.w2);
    CHECK(res2.model.b1 == res.model.b1);
    CHECK(res2.model.b2 == res.model.b2);
}

TEST_CASE("neural router config validation") {
    auto pairs = separable_pairs(64, 3);
    NeuralTrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS(train_neural_router(pairs, cfg));
    cfg.epochs = 1;
    cfg.learning_rate = 0.0;
    CHECK_THROWS(train_neural_router(pairs, cfg));
    cfg.learning_rate = 0.05;
    std::vector<TrainPair> one_label(pairs.begin(), pairs.end());
    for (auto& p : one_label) p.label = 1;
    CHECK_THROWS(train_neural_router(one_label, cfg));
}

TEST_CASE("all-zero model scores 0.5 everywhere") {
    NeuralRouterModel m;
    m.dim = 4;
    m.hidden = 3;
    m.w1.assign(m.hidden * m.input_width(), 0.0);
    m.b1.assign(m.hidden, 0.0);
    m.w2.assign(m.hidden, 0.0);
    m.b2 = 0.0;
    ClientProfile p;
    p.centroids = {normalize({1, 1, 0, 0})};
    CHECK(score_neural(m, normalize({0, 1, 1, 0}), p) == doctest::Approx(0.5));
}

TEST_CASE("neural model JSON round trip") {
    auto pairs = separable_pairs(200, 8);
    NeuralTrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 2;
    const auto res = train_neural_router(pairs, cfg);
    const auto j = neural_model_to_json(res.model);
    const auto m = neural_model_from_json(j);
    CHECK(m.dim == res.model.dim);
    CHECK(m.hidden == res.model.hidden);
    CHECK(m.w1 == res.model.w1);
    CHECK(m.b1 == res.model.b1);
    CHECK(m.w2 == res.model.w2);
    CHECK(m.b2 == res.model.b2);
}
