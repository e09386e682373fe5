#include "fedroute/adversary.hpp"

#include <cmath>
#include <stdexcept>

#include "fedroute/rng.hpp"

namespace fedroute {

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::forged_centroid: return "forged-centroid";
        case AttackKind::random: return "random";
        case AttackKind::stealth_poison: return "stealth-poison";
    }
    return "unknown";
}

AttackKind attack_kind_from_string(const std::string& s) {
    if (s == "forged-centroid") return AttackKind::forged_centroid;
    if (s == "random") return AttackKind::random;
    if (s == "stealth-poison") return AttackKind::stealth_poison;
    throw std::invalid_argument("unknown attack kind: " + s);
}

std::vector<DocumentRecord> sample_proxy(const std::vector<DocumentRecord>& target_pool,
                                         const std::vector<DocumentRecord>& nontarget_pool,
                                         std::size_t size, double alpha,
                                         std::uint64_t seed) {
    if (size < 1) throw std::invalid_argument("sample_proxy: size must be >= 1");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("sample_proxy: alpha must be in [0, 1]");
    const std::size_t n_target =
        static_cast<std::size_t>(std::lround(alpha * static_cast<double>(size)));
    const std::size_t n_other = size - n_target;
    if (n_target > target_pool.size())
        throw std::invalid_argument("sample_proxy: target pool too small (" +
                                    std::to_string(target_pool.size()) + " < " +
                                    std::to_string(n_target) + ")");
    if (n_other > nontarget_pool.size())
        throw std::invalid_argument("sample_proxy: non-target pool too small (" +
                                    std::to_string(nontarget_pool.size()) + " < " +
                                    std::to_string(n_other) + ")");
    std::vector<DocumentRecord> out;
    out.reserve(size);
    Rng rng(mix_seed(seed, 0x9909ULL));
    for (std::size_t i : rng.sample_indices(target_pool.size(), n_target))
        out.push_back(target_pool[i]);
    for (std::size_t i : rng.sample_indices(nontarget_pool.size(), n_other))
        out.push_back(nontarget_pool[i]);
    return out;
}

ClientProfile forge_centroid_profile(const std::vector<DocumentRecord>& proxy,
                                     const std::string& client_id,
                                     const std::optional<KMeansConfig>& kmeans_cfg) {
    if (proxy.empty()) throw std::invalid_argument("forge_centroid_profile: empty proxy");
    ClientProfile p;
    if (kmeans_cfg) {
        p = profile_kmeans(proxy, *kmeans_cfg, client_id);
    } else {
        p = profile_mean(proxy, client_id);
    }
    p.kind = ProfileKind::forged_centroid;
    return p;
}

ClientProfile forge_random_profile(std::size_t dim, std::uint64_t seed,
                                   const std::string& client_id) {
    if (dim < 2) throw std::invalid_argument("forge_random_profile: dim must be >= 2");
    Rng rng(mix_seed(seed, 0xF00DULL));
    Vec v(dim);
    for (auto& x : v) x = rng.gaussian();
    return {client_id, {normalize(v)}, ProfileKind::random, ""};
}

std::vector<DocumentRecord> malicious_evidence(const MaliciousClient& client,
                                               const Vec& query, std::size_t m,
                                               Exec exec) {
    if (m < 1) throw std::invalid_argument("malicious_evidence: m must be >= 1");
    if (client.true_corpus.empty())
        throw std::invalid_argument("malicious_evidence: empty true corpus");
    const auto idx = top_m_by_cosine(query, client.true_corpus, m, exec);
    std::vector<DocumentRecord> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(client.true_corpus[i]);
    return out;
}

}  // namespace fedroute
