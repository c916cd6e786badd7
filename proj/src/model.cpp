#include "kge/model.hpp"

#include <cmath>
#include <random>

namespace kge {

namespace {
constexpr double kInitBound = 0.01;

void check_same_dim(std::span<const double> s, std::span<const double> r,
                    std::span<const double> o) {
    if (s.size() != r.size() || s.size() != o.size())
        throw DimensionError("score: s/r/o length mismatch");
}
}  // namespace

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "analogy") return ModelKind::analogy;
    if (name == "distmult") return ModelKind::distmult;
    if (name == "complex") return ModelKind::complex_;
    if (name == "hole") return ModelKind::hole;
    throw ParseError("unknown model kind '" + name + "'");
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::analogy: return "analogy";
        case ModelKind::distmult: return "distmult";
        case ModelKind::complex_: return "complex";
        case ModelKind::hole: return "hole";
    }
    return "?";
}

void ModelConfig::validate() const {
    if (dim == 0) throw DimensionError("embedding dimension must be positive");
    if (kind == ModelKind::analogy) {
        if (num_scalars > dim)
            throw DimensionError("num_scalars exceeds embedding dimension");
        if ((dim - num_scalars) % 2 != 0)
            throw DimensionError("dim - num_scalars must be even");
    }
    if (kind == ModelKind::complex_ && dim % 2 != 0)
        throw DimensionError("complex model needs an even dimension");
}

std::pair<EntityTable, RelationTable> init_params(const ModelConfig& config,
                                                  std::size_t num_entities,
                                                  std::size_t num_relations,
                                                  std::uint64_t seed) {
    config.validate();
    if (num_entities == 0 || num_relations == 0)
        throw DimensionError("init_params: vocabulary sizes must be positive");

    Rng rng(seed);
    std::uniform_real_distribution<double> unif(-kInitBound, kInitBound);
    EntityTable entities(num_entities, config.dim);
    RelationTable relations(num_relations, config.dim);
    for (auto& v : entities.data) v = unif(rng);
    for (auto& v : relations.data) v = unif(rng);
    return {std::move(entities), std::move(relations)};
}

double score_analogy(std::span<const double> s, std::span<const double> r,
                     std::span<const double> o, std::size_t n) {
    check_same_dim(s, r, o);
    const std::size_t m = s.size();
    if (n > m || (m - n) % 2 != 0)
        throw DimensionError("score_analogy: invalid scalar count");

    double dot = 0;
    for (std::size_t i = 0; i < n; i++) dot += s[i] * r[i] * o[i];
    for (std::size_t j = n; j + 1 < m; j += 2) {
        const double x = r[j], y = r[j + 1];
        dot += x * (s[j] * o[j] + s[j + 1] * o[j + 1]) +
               y * (s[j + 1] * o[j] - s[j] * o[j + 1]);
    }
    return dot;
}

double score_distmult(std::span<const double> s, std::span<const double> r,
                      std::span<const double> o) {
    check_same_dim(s, r, o);
    double dot = 0;
    for (std::size_t i = 0; i < s.size(); i++) dot += s[i] * r[i] * o[i];
    return dot;
}

double score_complex(std::span<const double> s, std::span<const double> r,
                     std::span<const double> o) {
    check_same_dim(s, r, o);
    const std::size_t m = s.size();
    if (m % 2 != 0) throw DimensionError("score_complex: odd dimension");

    // coordinates stored (Im, Re) per complex coefficient
    double dot = 0;
    for (std::size_t k = 0; k + 1 < m; k += 2) {
        const double si = s[k], sr = s[k + 1];
        const double ri = r[k], rr = r[k + 1];
        const double oi = o[k], or_ = o[k + 1];
        dot += rr * (sr * or_ + si * oi) + ri * (sr * oi - si * or_);
    }
    return dot;
}

double score_hole(std::span<const double> s, std::span<const double> r,
                  std::span<const double> o) {
    check_same_dim(s, r, o);
    const std::size_t m = s.size();
    if (m == 0) throw DimensionError("score_hole: empty input");

    double dot = 0;
    for (std::size_t i = 0; i < m; i++) {
        double acc = 0;
        for (std::size_t j = 0; j < m; j++) acc += r[(i + m - j) % m] * o[j];
        dot += s[i] * acc;
    }
    return dot;
}

double score_triple(ModelKind kind, std::span<const double> s, std::span<const double> r,
                    std::span<const double> o, std::size_t n) {
    switch (kind) {
        case ModelKind::analogy: return score_analogy(s, r, o, n);
        case ModelKind::distmult: return score_distmult(s, r, o);
        case ModelKind::complex_: return score_complex(s, r, o);
        case ModelKind::hole: return score_hole(s, r, o);
    }
    throw DimensionError("score_triple: bad model kind");
}

void grad_triple(ModelKind kind, std::span<const double> s, std::span<const double> r,
                 std::span<const double> o, std::size_t n, TripleGradient& g) {
    check_same_dim(s, r, o);
    const std::size_t m = s.size();
    g.d_subject.assign(m, 0.0);
    g.d_relation.assign(m, 0.0);
    g.d_object.assign(m, 0.0);

    switch (kind) {
        case ModelKind::analogy: {
            if (n > m || (m - n) % 2 != 0)
                throw DimensionError("grad_triple: invalid scalar count");
            for (std::size_t i = 0; i < n; i++) {
                g.d_subject[i] = r[i] * o[i];
                g.d_relation[i] = s[i] * o[i];
                g.d_object[i] = s[i] * r[i];
            }
            for (std::size_t j = n; j + 1 < m; j += 2) {
                const double x = r[j], y = r[j + 1];
                g.d_relation[j] = s[j] * o[j] + s[j + 1] * o[j + 1];
                g.d_relation[j + 1] = s[j + 1] * o[j] - s[j] * o[j + 1];
                g.d_subject[j] = x * o[j] - y * o[j + 1];        // (B o) on the pair
                g.d_subject[j + 1] = y * o[j] + x * o[j + 1];
                g.d_object[j] = x * s[j] + y * s[j + 1];         // (B^T s) on the pair
                g.d_object[j + 1] = -y * s[j] + x * s[j + 1];
            }
            return;
        }
        case ModelKind::distmult: {
            for (std::size_t i = 0; i < m; i++) {
                g.d_subject[i] = r[i] * o[i];
                g.d_relation[i] = s[i] * o[i];
                g.d_object[i] = s[i] * r[i];
            }
            return;
        }
        case ModelKind::complex_: {
            if (m % 2 != 0) throw DimensionError("grad_triple: odd dimension");
            for (std::size_t k = 0; k + 1 < m; k += 2) {
                const double si = s[k], sr = s[k + 1];
                const double ri = r[k], rr = r[k + 1];
                const double oi = o[k], or_ = o[k + 1];
                g.d_subject[k] = rr * oi - ri * or_;
                g.d_subject[k + 1] = rr * or_ + ri * oi;
                g.d_relation[k] = sr * oi - si * or_;
                g.d_relation[k + 1] = sr * or_ + si * oi;
                g.d_object[k] = rr * si + ri * sr;
                g.d_object[k + 1] = rr * sr - ri * si;
            }
            return;
        }
        case ModelKind::hole: {
            for (std::size_t i = 0; i < m; i++) {
                double acc_s = 0;
                for (std::size_t j = 0; j < m; j++) acc_s += r[(i + m - j) % m] * o[j];
                g.d_subject[i] = acc_s;
            }
            for (std::size_t j = 0; j < m; j++) {
                double acc_o = 0;
                for (std::size_t i = 0; i < m; i++) acc_o += s[i] * r[(i + m - j) % m];
                g.d_object[j] = acc_o;
            }
            for (std::size_t k = 0; k < m; k++) {
                double acc_r = 0;
                for (std::size_t j = 0; j < m; j++) acc_r += s[(j + k) % m] * o[j];
                g.d_relation[k] = acc_r;
            }
            return;
        }
    }
    throw DimensionError("grad_triple: bad model kind");
}

TripleGradient grad_triple(ModelKind kind, std::span<const double> s,
                           std::span<const double> r, std::span<const double> o,
                           std::size_t n) {
    TripleGradient g;
    grad_triple(kind, s, r, o, n, g);
    return g;
}

Matrix expand_block_diag(std::span<const double> params, std::size_t m, std::size_t n) {
    if (params.size() != m) throw DimensionError("expand_block_diag: bad param length");
    if (n > m || (m - n) % 2 != 0)
        throw DimensionError("expand_block_diag: invalid layout");

    Matrix b(m, m);
    for (std::size_t i = 0; i < n; i++) b(i, i) = params[i];
    for (std::size_t j = n; j + 1 < m; j += 2) {
        const double x = params[j], y = params[j + 1];
        b(j, j) = x;
        b(j, j + 1) = -y;
        b(j + 1, j) = y;
        b(j + 1, j + 1) = x;
    }
    return b;
}

Matrix make_circulant(std::span<const double> x) {
    const std::size_t m = x.size();
    if (m == 0) throw DimensionError("make_circulant: empty input");
    Matrix c(m, m);
    for (std::size_t i = 0; i < m; i++)
        for (std::size_t j = 0; j < m; j++) c(i, j) = x[(i + m - j) % m];
    return c;
}

Model make_model(const ModelConfig& config, std::size_t num_entities,
                 std::size_t num_relations, std::uint64_t seed) {
    Model model;
    model.config = config;
    auto [e, r] = init_params(config, num_entities, num_relations, seed);
    model.entities = std::move(e);
    model.relations = std::move(r);
    return model;
}

}  // namespace kge
