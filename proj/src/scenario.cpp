#include "fedroute/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fedroute/robust.hpp"
#include "fedroute/rng.hpp"

namespace fedroute {

std::string to_string(DefenseKind k) {
    switch (k) {
        case DefenseKind::none: return "none";
        case DefenseKind::krum: return "krum";
        case DefenseKind::median: return "median";
        case DefenseKind::trimmed_mean: return "trimmed-mean";
        case DefenseKind::tasr_rel: return "tasr-rel";
        case DefenseKind::tasr_rel_cons: return "tasr-rel-cons";
        case DefenseKind::tasr_full: return "tasr-full";
    }
    return "unknown";
}

bool defense_is_tasr(DefenseKind k) {
    return k == DefenseKind::tasr_rel || k == DefenseKind::tasr_rel_cons ||
           k == DefenseKind::tasr_full;
}

namespace {

DefenseKind defense_from_string(const std::string& s) {
    if (s == "none") return DefenseKind::none;
    if (s == "krum") return DefenseKind::krum;
    if (s == "median") return DefenseKind::median;
    if (s == "trimmed-mean") return DefenseKind::trimmed_mean;
    if (s == "tasr-rel") return DefenseKind::tasr_rel;
    if (s == "tasr-rel-cons") return DefenseKind::tasr_rel_cons;
    if (s == "tasr-full") return DefenseKind::tasr_full;
    throw std::runtime_error("config: unknown defense kind: " + s);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "space.dim", "space.n_domains", "space.domain_seed", "space.spread",
        "space.target_domain",
        "clients.n_honest", "clients.topology", "clients.domains_per_client",
        "clients.docs_per_domain", "clients.profile", "clients.kmeans_k",
        "clients.kmeans_iters", "clients.kmeans_tol",
        "attack.n_adv", "attack.kind", "attack.proxy_size", "attack.target_fraction",
        "attack.seed", "attack.perturb_copies", "attack.stealth_angle_deg",
        "attack.forge_kmeans", "attack.true_corpus_size",
        "router.kind", "router.aggregation", "router.neural_hidden",
        "router.neural_epochs", "router.neural_lr", "router.neural_batch",
        "router.neural_pairs",
        "defense.kind", "defense.krum_f", "defense.trim_fraction",
        "defense.radius_multiplier",
        "tasr.gamma", "tasr.gamma_rec", "tasr.warmup", "tasr.s0", "tasr.tau_s",
        "tasr.alpha_r", "tasr.delta", "tasr.m",
        "stream.length", "stream.k_route", "stream.target_query_fraction",
        "stream.query_spread", "stream.post_burn_in", "stream.master_seed",
    };
    return keys;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_map(const ConfigMap& m) {
    for (const auto& [k, v] : m)
        if (!known_keys().count(k))
            throw std::runtime_error("config: unknown key: " + k);

    ScenarioConfig c;
    c.dim = cfg_size(m, "space.dim", c.dim);
    c.n_domains = cfg_size(m, "space.n_domains", c.n_domains);
    c.domain_seed = cfg_size(m, "space.domain_seed", c.domain_seed);
    c.spread = cfg_double(m, "space.spread", c.spread);
    c.target_domain = cfg_size(m, "space.target_domain", c.target_domain);

    c.n_honest = cfg_size(m, "clients.n_honest", c.n_honest);
    const std::string topo = cfg_str(m, "clients.topology", "multi");
    if (topo == "multi") c.topology = Topology::multi_domain;
    else if (topo == "single") c.topology = Topology::single_domain;
    else throw std::runtime_error("config: clients.topology must be single|multi");
    c.domains_per_client = cfg_size(m, "clients.domains_per_client", c.domains_per_client);
    c.docs_per_domain = cfg_size(m, "clients.docs_per_domain", c.docs_per_domain);
    const std::string prof = cfg_str(m, "clients.profile", "kmeans");
    if (prof == "kmeans") c.profile_method = ProfileMethod::kmeans;
    else if (prof == "mean") c.profile_method = ProfileMethod::mean;
    else throw std::runtime_error("config: clients.profile must be mean|kmeans");
    c.kmeans.k = cfg_size(m, "clients.kmeans_k", c.kmeans.k);
    c.kmeans.max_iters = cfg_size(m, "clients.kmeans_iters", c.kmeans.max_iters);
    c.kmeans.tol = cfg_double(m, "clients.kmeans_tol", c.kmeans.tol);

    c.attack.n_adv = cfg_size(m, "attack.n_adv", c.attack.n_adv);
    c.attack.kind = attack_kind_from_string(cfg_str(m, "attack.kind", "forged-centroid"));
    c.attack.proxy_size = cfg_size(m, "attack.proxy_size", c.attack.proxy_size);
    c.attack.target_fraction = cfg_double(m, "attack.target_fraction", c.attack.target_fraction);
    c.attack.seed = cfg_size(m, "attack.seed", c.attack.seed);
    c.attack.perturb_copies = cfg_bool(m, "attack.perturb_copies", c.attack.perturb_copies);
    c.attack.stealth_angle_deg = cfg_double(m, "attack.stealth_angle_deg", c.attack.stealth_angle_deg);
    c.attack.forge_kmeans = cfg_bool(m, "attack.forge_kmeans", c.attack.forge_kmeans);
    c.true_corpus_size = cfg_size(m, "attack.true_corpus_size", c.true_corpus_size);

    const std::string rk = cfg_str(m, "router.kind", "cosine");
    if (rk == "cosine") c.router = RouterKind::cosine;
    else if (rk == "neural") c.router = RouterKind::neural;
    else throw std::runtime_error("config: router.kind must be cosine|neural");
    const std::string agg = cfg_str(m, "router.aggregation", "max");
    if (agg == "max") c.aggregation = Aggregation::max;
    else if (agg == "mean") c.aggregation = Aggregation::mean;
    else throw std::runtime_error("config: router.aggregation must be max|mean");
    c.neural.hidden = cfg_size(m, "router.neural_hidden", c.neural.hidden);
    c.neural.epochs = cfg_size(m, "router.neural_epochs", c.neural.epochs);
    c.neural.learning_rate = cfg_double(m, "router.neural_lr", c.neural.learning_rate);
    c.neural.batch_size = cfg_size(m, "router.neural_batch", c.neural.batch_size);
    c.neural_pairs = cfg_size(m, "router.neural_pairs", c.neural_pairs);

    c.defense = defense_from_string(cfg_str(m, "defense.kind", "none"));
    c.krum_f = cfg_size(m, "defense.krum_f", c.krum_f);
    c.trim_fraction = cfg_double(m, "defense.trim_fraction", c.trim_fraction);
    c.radius_multiplier = cfg_double(m, "defense.radius_multiplier", c.radius_multiplier);

    c.tasr.gamma = cfg_double(m, "tasr.gamma", c.tasr.gamma);
    c.tasr.gamma_rec = cfg_double(m, "tasr.gamma_rec", c.tasr.gamma_rec);
    c.tasr.warmup = cfg_size(m, "tasr.warmup", c.tasr.warmup);
    c.tasr.s0 = cfg_double(m, "tasr.s0", c.tasr.s0);
    c.tasr.tau_s = cfg_double(m, "tasr.tau_s", c.tasr.tau_s);
    c.tasr.alpha_r = cfg_double(m, "tasr.alpha_r", c.tasr.alpha_r);
    c.tasr.delta = cfg_double(m, "tasr.delta", c.tasr.delta);
    c.tasr.m = cfg_size(m, "tasr.m", c.tasr.m);

    c.stream_length = cfg_size(m, "stream.length", c.stream_length);
    c.k_route = cfg_size(m, "stream.k_route", c.k_route);
    c.target_query_fraction = cfg_double(m, "stream.target_query_fraction", c.target_query_fraction);
    c.query_spread = cfg_double(m, "stream.query_spread", c.query_spread);
    c.post_burn_in = cfg_size(m, "stream.post_burn_in", c.post_burn_in);
    c.master_seed = cfg_size(m, "stream.master_seed", c.master_seed);

    c.validate();
    return c;
}

void ScenarioConfig::validate() const {
    if (dim < 2) throw std::runtime_error("config: space.dim must be >= 2");
    if (n_domains < 2) throw std::runtime_error("config: space.n_domains must be >= 2");
    if (target_domain >= n_domains)
        throw std::runtime_error("config: space.target_domain out of range");
    if (n_honest < 1) throw std::runtime_error("config: clients.n_honest must be >= 1");
    if (stream_length < 1) throw std::runtime_error("config: stream.length must be >= 1");
    if (topology == Topology::multi_domain &&
        (domains_per_client < 2 || domains_per_client > n_domains))
        throw std::runtime_error("config: clients.domains_per_client out of range");
    if (target_query_fraction < 0.0 || target_query_fraction > 1.0)
        throw std::runtime_error("config: stream.target_query_fraction must be in [0, 1]");
    if (attack.target_fraction < 0.0 || attack.target_fraction > 1.0)
        throw std::runtime_error("config: attack.target_fraction must be in [0, 1]");
    const std::size_t total = n_honest + attack.n_adv;
    if (k_route < 1 || k_route > total)
        throw std::runtime_error("config: stream.k_route out of range");
    tasr.validate();
}

namespace {

std::string pad2(std::size_t i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
}

std::set<std::string> client_domains(const ScenarioConfig& cfg, std::size_t i) {
    std::set<std::string> out;
    if (cfg.topology == Topology::single_domain) {
        out.insert("d" + std::to_string(i % cfg.n_domains));
    } else {
        for (std::size_t j = 0; j < cfg.domains_per_client; ++j)
            out.insert("d" + std::to_string((i + j) % cfg.n_domains));
    }
    return out;
}

}  // namespace

Environment build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Environment env;
    env.cfg = cfg;

    const auto means = domain_mean_directions(cfg.n_domains, cfg.dim, cfg.domain_seed);
    env.domains.reserve(cfg.n_domains);
    for (std::size_t d = 0; d < cfg.n_domains; ++d)
        env.domains.push_back({"d" + std::to_string(d), means[d], cfg.spread,
                               mix_seed(cfg.domain_seed, d)});

    // Honest clients.
    for (std::size_t i = 0; i < cfg.n_honest; ++i) {
        HonestClient hc;
        hc.id = "h" + pad2(i);
        hc.domains = client_domains(cfg, i);
        for (const auto& dom : hc.domains) {
            const std::size_t d = std::stoul(dom.substr(1));
            DomainSpec spec = env.domains[d];
            spec.seed = mix_seed(cfg.master_seed, 0xC0DE0000ULL + i * 1009 + d);
            auto docs = synth_corpus(spec, cfg.docs_per_domain, hc.id + "-");
            hc.corpus.insert(hc.corpus.end(), docs.begin(), docs.end());
            env.domain_holders[dom].insert(hc.id);
        }
        if (cfg.profile_method == ProfileMethod::mean) {
            hc.profile = profile_mean(hc.corpus, hc.id);
        } else {
            KMeansConfig km = cfg.kmeans;
            km.seed = mix_seed(cfg.master_seed, 0x5EED0000ULL + i);
            hc.profile = profile_kmeans(hc.corpus, km, hc.id);
        }
        env.honest.push_back(std::move(hc));
    }

    // Adversary construction.
    const std::string target_id = env.domains[cfg.target_domain].domain_id;
    if (cfg.attack.n_adv > 0) {
        ClientProfile forged;
        if (cfg.attack.kind != AttackKind::random) {
            const std::size_t pool_n = std::max<std::size_t>(2 * cfg.attack.proxy_size, 200);
            DomainSpec tspec = env.domains[cfg.target_domain];
            tspec.seed = mix_seed(cfg.master_seed, 0xA7700001ULL);
            const auto target_pool = synth_corpus(tspec, pool_n, "proxyT-");

            std::vector<DocumentRecord> nontarget_pool;
            const std::size_t per_dom =
                pool_n / (cfg.n_domains - 1) + (pool_n % (cfg.n_domains - 1) ? 1 : 0);
            for (std::size_t d = 0; d < cfg.n_domains; ++d) {
                if (d == cfg.target_domain) continue;
                DomainSpec s = env.domains[d];
                s.seed = mix_seed(cfg.master_seed, 0xA7700100ULL + d);
                auto docs = synth_corpus(s, per_dom, "proxyN-");
                nontarget_pool.insert(nontarget_pool.end(), docs.begin(), docs.end());
            }

            const auto proxy =
                sample_proxy(target_pool, nontarget_pool, cfg.attack.proxy_size,
                             cfg.attack.target_fraction,
                             mix_seed(cfg.master_seed, cfg.attack.seed));
            std::optional<KMeansConfig> km;
            if (cfg.attack.forge_kmeans) {
                km = cfg.kmeans;
                km->k = std::min(km->k, proxy.size());
                km->seed = mix_seed(cfg.master_seed, 0xF0A6ED);
            }
            forged = forge_centroid_profile(proxy, "", km);
            forged.declared_domain = target_id;
        }

        for (std::size_t a = 0; a < cfg.attack.n_adv; ++a) {
            MaliciousClient mc;
            mc.client_id = "m" + pad2(a);
            if (cfg.attack.kind == AttackKind::random) {
                mc.uploaded_profile = forge_random_profile(
                    cfg.dim, mix_seed(cfg.master_seed, cfg.attack.seed + 31 * a),
                    mc.client_id);
            } else {
                mc.uploaded_profile = forged;
                mc.uploaded_profile.client_id = mc.client_id;
                if (cfg.attack.perturb_copies) {
                    Rng rng(mix_seed(cfg.master_seed, 0x9E47ULL + a));
                    for (auto& c : mc.uploaded_profile.centroids) {
                        for (auto& x : c) x += 0.01 * rng.gaussian();
                        c = normalize(c);
                    }
                }
            }
            // True corpus: off-target for forged/random; a related domain at the
            // configured angle for stealth poisoning.
            DomainSpec tc;
            if (cfg.attack.kind == AttackKind::stealth_poison) {
                const double rad =
                    cfg.attack.stealth_angle_deg * std::numbers::pi / 180.0;
                tc.domain_id = "related-" + target_id;
                tc.mean_direction = rotate_toward(env.domains[cfg.target_domain].mean_direction,
                                                  rad, mix_seed(cfg.master_seed, 0x57EAULL));
                tc.spread = cfg.spread;
            } else {
                const std::size_t off =
                    (cfg.target_domain + 1 + (a % (cfg.n_domains - 1))) % cfg.n_domains;
                tc = env.domains[off];
            }
            tc.seed = mix_seed(cfg.master_seed, 0xBAD0000ULL + a);
            mc.true_corpus = synth_corpus(tc, cfg.true_corpus_size, mc.client_id + "-");
            env.adv_ids.insert(mc.client_id);
            env.malicious.push_back(std::move(mc));
        }
    }

    for (const auto& hc : env.honest) env.registered[hc.id] = hc.profile;
    for (const auto& mc : env.malicious) env.registered[mc.client_id] = mc.uploaded_profile;

    // Profile-level defenses applied at registration time.
    if (cfg.defense == DefenseKind::krum) {
        std::vector<ClientProfile> all;
        for (const auto& [id, p] : env.registered) all.push_back(p);
        const auto res = krum_filter(all, cfg.krum_f);
        env.excluded.insert(res.flagged.begin(), res.flagged.end());
    } else if (cfg.defense == DefenseKind::median ||
               cfg.defense == DefenseKind::trimmed_mean) {
        std::vector<ClientProfile> all;
        for (const auto& [id, p] : env.registered) all.push_back(p);
        const auto method = cfg.defense == DefenseKind::median ? RobustMethod::median
                                                               : RobustMethod::trimmed_mean;
        const auto ref = coordinate_reference(all, method, cfg.trim_fraction);
        for (auto& p : clip_to_reference(all, ref, cfg.radius_multiplier))
            env.registered[p.client_id] = p;
    }

    if (cfg.router == RouterKind::neural) {
        // Labeled (query, profile) pairs: relevant iff the client holds the
        // query's domain. Drawn from the same generators as the stream.
        Rng rng(mix_seed(cfg.master_seed, 0x7EA1ULL));
        std::vector<TrainPair> pairs;
        pairs.reserve(cfg.neural_pairs);
        for (std::size_t i = 0; i < cfg.neural_pairs; ++i) {
            const std::size_t d = rng.uniform_index(cfg.n_domains);
            Vec q(cfg.dim);
            for (std::size_t j = 0; j < cfg.dim; ++j)
                q[j] = env.domains[d].mean_direction[j] + cfg.query_spread * rng.gaussian();
            const auto& hc = env.honest[rng.uniform_index(env.honest.size())];
            pairs.push_back({normalize(q), hc.profile,
                             hc.domains.count(env.domains[d].domain_id) ? 1 : 0});
        }
        NeuralTrainConfig ncfg = cfg.neural;
        ncfg.seed = mix_seed(cfg.master_seed, 0x4E7ULL);
        env.neural_model = train_neural_router(pairs, ncfg).model;
    }

    if (env.domain_holders.find(target_id) == env.domain_holders.end())
        throw std::runtime_error(
            "build_scenario: no honest client holds the target domain; "
            "honest-target access metrics would be undefined");
    return env;
}

StreamQuery sample_query(const Environment& env, std::size_t t) {
    const auto& cfg = env.cfg;
    Rng rng(mix_seed(cfg.master_seed, 0x0157EA40ULL + t));
    std::size_t d = cfg.target_domain;
    if (rng.uniform() >= cfg.target_query_fraction) {
        std::size_t pick = rng.uniform_index(cfg.n_domains - 1);
        d = pick >= cfg.target_domain ? pick + 1 : pick;
    }
    Vec q(cfg.dim);
    for (std::size_t j = 0; j < cfg.dim; ++j)
        q[j] = env.domains[d].mean_direction[j] + cfg.query_spread * rng.gaussian();
    return {"q" + std::to_string(t), env.domains[d].domain_id, normalize(q)};
}

std::uint64_t Environment::digest() const {
    std::string blob;
    for (const auto& [id, p] : registered) blob += profile_to_json(p).dump();
    for (const auto& id : excluded) blob += "|x:" + id;
    if (neural_model) blob += neural_model_to_json(*neural_model).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : blob) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace fedroute
