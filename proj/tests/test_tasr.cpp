#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "fedroute/rng.hpp"
#include "fedroute/tasr.hpp"
#include "fedroute/vec.hpp"

using namespace fedroute;

namespace {

std::vector<DocumentRecord> evidence_of(const std::vector<Vec>& vs) {
    std::vector<DocumentRecord> docs;
    for (std::size_t i = 0; i < vs.size(); ++i)
        docs.push_back({"e" + std::to_string(i), "d0", vs[i]});
    return docs;
}

Feedback fb(double rel, double cons, double agr) {
    Feedback f;
    f.f_rel = rel;
    f.rel_valid = true;
    f.f_cons = cons;
    f.cons_valid = true;
    f.f_agr = agr;
    f.agr_valid = true;
    return f;
}

}  // namespace

TEST_CASE("soft_gate examples") {
    CHECK(soft_gate(1.0, 0.3) == doctest::Approx(1.0));
    CHECK(soft_gate(0.0, 0.1) == doctest::Approx(0.1));
    CHECK(soft_gate(0.5, 0.1) == doctest::Approx(0.55));
}

TEST_CASE("cold_start_ramp examples") {
    CHECK(cold_start_ramp(0, 0.7, 50) == doctest::Approx(0.7));
    CHECK(cold_start_ramp(50, 0.7, 50) == doctest::Approx(1.0));
    CHECK(cold_start_ramp(25, 0.7, 50) == doctest::Approx(0.85));
    CHECK(cold_start_ramp(500, 0.7, 50) == doctest::Approx(1.0));  // capped
}

TEST_CASE("trust_weight examples") {
    TasrConfig cfg;
    cfg.alpha_r = 2.0;
    cfg.delta = 0.1;
    ClientTrust t;
    CHECK(trust_weight(t, cfg) == doctest::Approx(1.0));

    t.u_rel = 0.9;
    CHECK(trust_weight(t, cfg) == doctest::Approx(0.81));

    t.u_rel = 1.0;
    t.u_cons = 0.0;
    CHECK(trust_weight(t, cfg) == doctest::Approx(0.1));

    // Ablated signals contribute a neutral factor.
    cfg.use_cons = false;
    CHECK(trust_weight(t, cfg) == doctest::Approx(1.0));
}

TEST_CASE("tasr_route reduces to plain routing under uniform trust") {
    TasrConfig cfg;
    const std::vector<std::string> ids = {"a", "b", "c", "d"};
    TrustRegistry trust = make_trust_registry(ids, cfg);
    for (auto& [id, t] : trust.clients) t.s = 1.0;
    const ScoreMap scores = {{"a", 0.9}, {"b", 0.2}, {"c", 0.5}, {"d", -0.1}};
    CHECK(tasr_route(scores, trust, cfg, 2).top_k == route_topk(scores, 2).top_k);
    CHECK(tasr_route(scores, trust, cfg, 4).top_k == route_topk(scores, 4).top_k);

    // Suppressed high scorer loses to an honest mid scorer.
    trust.clients["a"].u_rel = 0.1;  // tau ~ 0.01 under alpha_r = 2
    const auto d = tasr_route(scores, trust, cfg, 1);
    CHECK(d.top_k == std::vector<std::string>{"c"});

    TrustRegistry missing = trust;
    missing.clients.erase("d");
    CHECK_THROWS(tasr_route(scores, missing, cfg, 1));
}

TEST_CASE("feedback_relevance examples") {
    const Vec q = normalize({1, 1, 0});
    CHECK(feedback_relevance(q, evidence_of({q, q, q})) == doctest::Approx(1.0));
    CHECK(feedback_relevance(q, evidence_of({normalize({1, -1, 0})})) == doctest::Approx(0.5));
    Vec neg = q;
    for (auto& x : neg) x = -x;
    CHECK(feedback_relevance(q, evidence_of({q, neg})) == doctest::Approx(0.5));
}

TEST_CASE("feedback_consistency examples") {
    ClientProfile p;
    p.centroids = {normalize({0, 1, 0})};
    const Vec q = normalize({1, 0, 0});
    CHECK(feedback_consistency(q, p, evidence_of({p.centroids[0], p.centroids[0]})) ==
          doctest::Approx(1.0));

    // Two centroids equidistant from the query weigh 0.5 each: the result is
    // the plain average of centroid-evidence cosines.
    ClientProfile two;
    two.centroids = {normalize({1, 1, 0}), normalize({1, -1, 0})};
    const Vec ev = normalize({0, 0, 1});
    const double expected =
        0.5 * (0.5 * (cosine(two.centroids[0], ev) + 1.0) + 0.5 * (cosine(two.centroids[1], ev) + 1.0));
    CHECK(feedback_consistency(q, two, evidence_of({ev})) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("feedback_agreement examples") {
    const Vec a = normalize({1, 0, 0}), b = normalize({0, 1, 0});
    std::map<std::string, std::vector<DocumentRecord>> ev;
    std::map<std::string, double> rel;

    SUBCASE("identical evidence, both at or above median") {
        ev["x"] = evidence_of({a, b});
        ev["y"] = evidence_of({a, b});
        rel["x"] = 0.8;
        rel["y"] = 0.8;
        auto out = feedback_agreement(ev, rel);
        REQUIRE(out.at("x").has_value());
        CHECK(*out.at("x") == doctest::Approx(1.0));
        CHECK(*out.at("y") == doctest::Approx(1.0));
    }
    SUBCASE("single selected client has no peers") {
        ev["x"] = evidence_of({a});
        rel["x"] = 0.9;
        auto out = feedback_agreement(ev, rel);
        CHECK_FALSE(out.at("x").has_value());
    }
    SUBCASE("orthogonal outsider maps to 0.5") {
        ev["x"] = evidence_of({normalize({0, 0, 1})});
        ev["y"] = evidence_of({a});
        ev["z"] = evidence_of({a});
        rel["x"] = 0.2;  // below median: not in anyone's peer pool
        rel["y"] = 0.9;
        rel["z"] = 0.9;
        auto out = feedback_agreement(ev, rel);
        REQUIRE(out.at("x").has_value());
        CHECK(*out.at("x") == doctest::Approx(0.5));  // max cosine to pool = 0
        CHECK(*out.at("y") == doctest::Approx(1.0));  // z returns the same doc
    }
}

TEST_CASE("lower_median order statistic") {
    CHECK(lower_median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(lower_median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.0));
    CHECK(lower_median({5.0}) == doctest::Approx(5.0));
}

TEST_CASE("trust_update decay, recovery, warmup, caps") {
    TasrConfig cfg;
    cfg.warmup = 2;
    const std::vector<std::string> ids = {"lo", "mid", "hi"};
    TrustRegistry trust = make_trust_registry(ids, cfg);

    std::map<std::string, Feedback> feedback = {
        {"lo", fb(0.1, 0.1, 0.1)}, {"mid", fb(0.5, 0.5, 0.5)}, {"hi", fb(0.9, 0.9, 0.9)}};

    // Warmup: t = 1, 2 leave trust untouched.
    trust_update(trust, feedback, cfg);
    trust_update(trust, feedback, cfg);
    CHECK(trust.t == 2);
    for (const auto& id : ids) {
        CHECK(trust.clients[id].u_rel == doctest::Approx(1.0));
        CHECK(trust.clients[id].u_cons == doctest::Approx(1.0));
        CHECK(trust.clients[id].u_agr == doctest::Approx(1.0));
    }

    // Three post-warmup updates: only the below-median client decays.
    for (int i = 0; i < 3; ++i) trust_update(trust, feedback, cfg);
    CHECK(trust.clients["lo"].u_rel == doctest::Approx(0.729).epsilon(1e-12));  // 0.9^3
    CHECK(trust.clients["mid"].u_rel == doctest::Approx(1.0));  // capped recovery
    CHECK(trust.clients["hi"].u_rel == doctest::Approx(1.0));
    CHECK(trust.clients["lo"].u_cons == doctest::Approx(0.729).epsilon(1e-12));

    // Uncapped recovery arithmetic.
    trust.clients["mid"].u_rel = 0.5;
    trust_update(trust, feedback, cfg);
    CHECK(trust.clients["mid"].u_rel == doctest::Approx(0.51).epsilon(1e-12));

    // Invalid signals are untouched; a single selected client never changes u_agr.
    TrustRegistry solo = make_trust_registry({"only"}, cfg);
    solo.t = 10;
    Feedback f;
    f.f_rel = 0.0;
    f.rel_valid = true;  // cons/agr invalid
    solo.clients["only"].u_cons = 0.42;
    solo.clients["only"].u_agr = 0.43;
    trust_update(solo, {{"only", f}}, cfg);
    CHECK(solo.clients["only"].u_cons == doctest::Approx(0.42));
    CHECK(solo.clients["only"].u_agr == doctest::Approx(0.43));
    // Sole valid relevance value sits at its own median: recovery.
    CHECK(solo.clients["only"].u_rel == doctest::Approx(1.0));
}

TEST_CASE("trust stays in [0,1] and follows closed forms under random updates") {
    TasrConfig cfg;
    cfg.warmup = 0;
    TrustRegistry trust = make_trust_registry({"a", "b", "c"}, cfg);
    Rng rng(33);
    int below_count_a = 0;
    bool a_ever_recovered = false;
    for (int i = 0; i < 1000; ++i) {
        std::map<std::string, Feedback> feedback;
        double fa = rng.uniform();
        feedback["a"] = fb(fa, rng.uniform(), rng.uniform());
        double fbv = rng.uniform(), fc = rng.uniform();
        feedback["b"] = fb(fbv, rng.uniform(), rng.uniform());
        feedback["c"] = fb(fc, rng.uniform(), rng.uniform());
        const double med = lower_median({fa, fbv, fc});
        if (fa < med && !a_ever_recovered) ++below_count_a;
        if (fa >= med) a_ever_recovered = true;
        trust_update(trust, feedback, cfg);
        for (const auto& [id, t] : trust.clients) {
            CHECK(t.u_rel >= 0.0);
            CHECK(t.u_rel <= 1.0);
            CHECK(t.u_cons >= 0.0);
            CHECK(t.u_cons <= 1.0);
            CHECK(t.u_agr >= 0.0);
            CHECK(t.u_agr <= 1.0);
            CHECK(t.s >= cfg.s0);
            CHECK(t.s <= 1.0);
            const double tau = trust_weight(t, cfg);
            CHECK(tau > 0.0);
            CHECK(tau <= 1.0);
        }
        // Pure-decay prefix follows the closed form gamma^n exactly.
        if (!a_ever_recovered)
            CHECK(trust.clients["a"].u_rel ==
                  doctest::Approx(std::pow(cfg.gamma, below_count_a)).epsilon(1e-12));
    }
}

TEST_CASE("trust registry JSON round trip") {
    TasrConfig cfg;
    TrustRegistry trust = make_trust_registry({"a", "b"}, cfg);
    trust.t = 123;
    trust.clients["a"].u_rel = 0.25;
    trust.clients["b"].u_agr = 0.75;
    trust.clients["b"].s = 0.9;
    const auto j = trust_to_json(trust);
    const auto r = trust_from_json(j);
    CHECK(r.t == trust.t);
    CHECK(r.clients.at("a").u_rel == trust.clients.at("a").u_rel);
    CHECK(r.clients.at("b").u_agr == trust.clients.at("b").u_agr);
    CHECK(r.clients.at("b").s == trust.clients.at("b").s);
}
