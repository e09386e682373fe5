#include "fedroute/profile.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fedroute/rng.hpp"

namespace fedroute {

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::mean: return "mean";
        case ProfileKind::kmeans: return "kmeans";
        case ProfileKind::random: return "random";
        case ProfileKind::forged_centroid: return "forged-centroid";
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "mean") return ProfileKind::mean;
    if (s == "kmeans") return ProfileKind::kmeans;
    if (s == "random") return ProfileKind::random;
    if (s == "forged-centroid") return ProfileKind::forged_centroid;
    throw std::invalid_argument("unknown profile kind: " + s);
}

ClientProfile profile_mean(const std::vector<DocumentRecord>& docs,
                           const std::string& client_id) {
    if (docs.empty()) throw std::invalid_argument("profile_mean: empty corpus");
    const std::size_t dim = docs.front().embedding.size();
    Vec mean(dim, 0.0);
    for (const auto& d : docs) {
        if (d.embedding.size() != dim)
            throw std::invalid_argument("profile_mean: inconsistent dims in corpus");
        for (std::size_t i = 0; i < dim; ++i) mean[i] += d.embedding[i];
    }
    for (auto& x : mean) x /= static_cast<double>(docs.size());
    if (norm(mean) == 0.0)
        throw std::invalid_argument("profile_mean: degenerate mean (zero vector)");
    return {client_id, {normalize(mean)}, ProfileKind::mean, ""};
}

namespace {

double sq_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// k-means++ seeding: first center uniform, then proportional to squared
// distance to the nearest chosen center.
std::vector<Vec> kmeanspp_init(const std::vector<Vec>& pts, std::size_t k, Rng& rng) {
    std::vector<Vec> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.uniform_index(pts.size())]);
    std::vector<double> d2(pts.size());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& ctr : centers) best = std::min(best, sq_dist(pts[i], ctr));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = pts.size() - 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                acc += d2[i];
                if (acc >= r) { pick = i; break; }
            }
        } else {
            pick = rng.uniform_index(pts.size());
        }
        centers.push_back(pts[pick]);
    }
    return centers;
}

}  // namespace

ClientProfile profile_kmeans(const std::vector<DocumentRecord>& docs,
                             const KMeansConfig& cfg,
                             const std::string& client_id,
                             std::vector<double>* wcss_trace) {
    if (cfg.k < 1) throw std::invalid_argument("profile_kmeans: k must be >= 1");
    if (cfg.max_iters < 1) throw std::invalid_argument("profile_kmeans: max_iters must be >= 1");
    if (docs.size() < cfg.k)
        throw std::invalid_argument("profile_kmeans: need at least k=" +
                                    std::to_string(cfg.k) + " docs, got " +
                                    std::to_string(docs.size()));
    const std::size_t n = docs.size();
    const std::size_t dim = docs.front().embedding.size();
    std::vector<Vec> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = docs[i].embedding;

    Rng rng(cfg.seed);
    std::vector<Vec> centers = kmeanspp_init(pts, cfg.k, rng);
    std::vector<std::size_t> assign(n, 0);

    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        // Assignment: nearest center, tie broken by lower index.
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bestd = sq_dist(pts[i], centers[0]);
            for (std::size_t c = 1; c < cfg.k; ++c) {
                const double d = sq_dist(pts[i], centers[c]);
                if (d < bestd) { bestd = d; best = c; }
            }
            assign[i] = best;
            wcss += bestd;
        }
        if (wcss_trace) wcss_trace->push_back(wcss);

        // Update.
        std::vector<Vec> next(cfg.k, Vec(dim, 0.0));
        std::vector<std::size_t> count(cfg.k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) next[assign[i]][j] += pts[i][j];
            ++count[assign[i]];
        }
        for (std::size_t c = 0; c < cfg.k; ++c) {
            if (count[c] > 0) {
                for (auto& x : next[c]) x /= static_cast<double>(count[c]);
            } else {
                // Empty cluster: re-seed to the point farthest from its own center.
                std::size_t far = 0;
                double fard = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(pts[i], centers[assign[i]]);
                    if (d > fard) { fard = d; far = i; }
                }
                next[c] = pts[far];
            }
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < cfg.k; ++c)
            shift = std::max(shift, std::sqrt(sq_dist(centers[c], next[c])));
        centers = std::move(next);
        if (shift <= cfg.tol) break;
    }

    ClientProfile p{client_id, {}, ProfileKind::kmeans, ""};
    p.centroids.reserve(cfg.k);
    for (auto& c : centers) p.centroids.push_back(normalize(c));
    return p;
}

nlohmann::ordered_json profile_to_json(const ClientProfile& p) {
    nlohmann::ordered_json j;
    j["client_id"] = p.client_id;
    j["kind"] = to_string(p.kind);
    if (p.declared_domain.empty())
        j["declared_domain"] = nullptr;
    else
        j["declared_domain"] = p.declared_domain;
    j["centroids"] = p.centroids;
    return j;
}

ClientProfile profile_from_json(const nlohmann::json& j) {
    ClientProfile p;
    p.client_id = j.at("client_id").get<std::string>();
    p.kind = profile_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("declared_domain") && !j["declared_domain"].is_null())
        p.declared_domain = j["declared_domain"].get<std::string>();
    p.centroids = j.at("centroids").get<std::vector<Vec>>();
    return p;
}

}  // namespace fedroute
