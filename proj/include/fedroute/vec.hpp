#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedroute {

// Embedding vectors are plain double sequences; everything that enters
// routing is renormalized to the unit sphere.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);

// Throws std::invalid_argument on a zero vector.
Vec normalize(const Vec& v);

// Clamped to [-1, 1]. Throws on dimension mismatch or zero input.
double cosine(const Vec& a, const Vec& b);

struct DomainSpec {
    std::string domain_id;
    Vec mean_direction;  // unit
    double spread = 0.0; // per-coordinate gaussian sigma before renormalization
    std::uint64_t seed = 0;
};

struct DocumentRecord {
    std::string doc_id;
    std::string domain_id;
    Vec embedding;  // unit
};

// Deterministic synthetic corpus: n records, each
// normalize(mean_direction + spread * gaussian per coordinate).
// doc ids are "<prefix><domain_id>-<index>".
std::vector<DocumentRecord> synth_corpus(const DomainSpec& spec, std::size_t n,
                                         const std::string& id_prefix = "");

// Random unit mean directions for multi-domain scenarios, all derived
// from one master seed.
std::vector<Vec> domain_mean_directions(std::size_t n_domains, std::size_t dim,
                                        std::uint64_t master_seed);

// Unit vector at the given angle from `base`, in the plane spanned by
// `base` and a seeded random orthogonal direction.
Vec rotate_toward(const Vec& base, double angle_rad, std::uint64_t seed);

// Text format: header "fedroute-emb v1 dim=<D> count=<N>" then N lines
// "<doc_id>\t<domain_id>\t<c1>,<c2>,...,<cD>".
void save_embeddings(const std::string& path,
                     const std::vector<DocumentRecord>& records,
                     std::size_t dim);
std::vector<DocumentRecord> load_embeddings(const std::string& path);

}  // namespace fedroute
