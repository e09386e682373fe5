#include "fedroute/vec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fedroute/rng.hpp"

namespace fedroute {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec normalize(const Vec& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("normalize: zero vector");
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double cosine(const Vec& a, const Vec& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero vector");
    const double c = dot(a, b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

std::vector<DocumentRecord> synth_corpus(const DomainSpec& spec, std::size_t n,
                                         const std::string& id_prefix) {
    if (n < 1) throw std::invalid_argument("synth_corpus: n must be >= 1");
    if (spec.spread < 0.0) throw std::invalid_argument("synth_corpus: spread < 0");
    Rng rng(mix_seed(spec.seed, n));
    std::vector<DocumentRecord> out;
    out.reserve(n);
    const std::size_t dim = spec.mean_direction.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec v(dim);
        for (std::size_t j = 0; j < dim; ++j)
            v[j] = spec.mean_direction[j] + spec.spread * rng.gaussian();
        out.push_back({id_prefix + spec.domain_id + "-" + std::to_string(i),
                       spec.domain_id, normalize(v)});
    }
    return out;
}

std::vector<Vec> domain_mean_directions(std::size_t n_domains, std::size_t dim,
                                        std::uint64_t master_seed) {
    std::vector<Vec> means;
    means.reserve(n_domains);
    for (std::size_t d = 0; d < n_domains; ++d) {
        Rng rng(mix_seed(master_seed, 0xD0D0ULL + d));
        Vec v(dim);
        for (auto& x : v) x = rng.gaussian();
        means.push_back(normalize(v));
    }
    return means;
}

Vec rotate_toward(const Vec& base, double angle_rad, std::uint64_t seed) {
    const Vec u = normalize(base);
    Rng rng(mix_seed(seed, 0x0A11ULL));
    Vec w(u.size());
    for (auto& x : w) x = rng.gaussian();
    // Gram-Schmidt against base.
    const double p = dot(w, u);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= p * u[i];
    const Vec o = normalize(w);
    Vec out(u.size());
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = c * u[i] + s * o[i];
    return normalize(out);
}

void save_embeddings(const std::string& path,
                     const std::vector<DocumentRecord>& records,
                     std::size_t dim) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_embeddings: cannot open " + path);
    f << "fedroute-emb v1 dim=" << dim << " count=" << records.size() << "\n";
    char buf[32];
    for (const auto& r : records) {
        if (r.embedding.size() != dim)
            throw std::invalid_argument("save_embeddings: record " + r.doc_id +
                                        " has dim " + std::to_string(r.embedding.size()));
        f << r.doc_id << '\t' << r.domain_id << '\t';
        for (std::size_t i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", r.embedding[i]);
            f << (i ? "," : "") << buf;
        }
        f << '\n';
    }
}

std::vector<DocumentRecord> load_embeddings(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_embeddings: cannot open " + path);
    std::string header;
    if (!std::getline(f, header))
        throw std::runtime_error("load_embeddings: empty file, missing header");
    std::size_t dim = 0, count = 0;
    if (std::sscanf(header.c_str(), "fedroute-emb v1 dim=%zu count=%zu", &dim,
                    &count) != 2)
        throw std::runtime_error("load_embeddings: malformed header: '" + header + "'");
    if (dim < 2) throw std::runtime_error("load_embeddings: dim must be >= 2");

    std::vector<DocumentRecord> out;
    out.reserve(count);
    std::string line;
    for (std::size_t row = 0; row < count; ++row) {
        if (!std::getline(f, line))
            throw std::runtime_error("load_embeddings: expected " +
                                     std::to_string(count) + " rows, got " +
                                     std::to_string(row));
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 == std::string::npos ? 0 : t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw std::runtime_error("load_embeddings: malformed row " +
                                     std::to_string(row + 1) + ": missing tab separators");
        DocumentRecord r;
        r.doc_id = line.substr(0, t1);
        r.domain_id = line.substr(t1 + 1, t2 - t1 - 1);
        r.embedding.reserve(dim);
        std::istringstream coords(line.substr(t2 + 1));
        std::string tok;
        while (std::getline(coords, tok, ',')) {
            std::size_t pos = 0;
            double x = 0.0;
            try {
                x = std::stod(tok, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("load_embeddings: bad coordinate '" + tok +
                                         "' at row " + std::to_string(row + 1));
            }
            if (!std::isfinite(x))
                throw std::runtime_error("load_embeddings: non-finite coordinate at row " +
                                         std::to_string(row + 1));
            r.embedding.push_back(x);
        }
        if (r.embedding.size() != dim)
            throw std::runtime_error("load_embeddings: row " + std::to_string(row + 1) +
                                     " has " + std::to_string(r.embedding.size()) +
                                     " coordinates, expected " + std::to_string(dim));
        r.embedding = normalize(r.embedding);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace fedroute
