#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kge/common.hpp"
#include "kge/linalg.hpp"

namespace kge {

enum class ModelKind : std::uint8_t {
    analogy = 0,   // almost-diagonal relation maps: n scalars + (m-n)/2 blocks [[x,-y],[y,x]]
    distmult = 1,  // diagonal relation maps
    complex_ = 2,  // m/2 complex coefficients stored as (Im, Re) pairs
    hole = 3,      // circulant relation maps from a length-m generator
};

ModelKind model_kind_from_name(const std::string& name);
const char* model_kind_name(ModelKind kind);

struct ModelConfig {
    ModelKind kind = ModelKind::analogy;
    std::uint32_t dim = 200;         // m
    std::uint32_t num_scalars = 100; // n; used by analogy only

    void validate() const;
};

// Flat row-major parameter table, one row per symbol.
struct ParamTable {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> data;

    ParamTable() = default;
    ParamTable(std::size_t r, std::size_t d, double fill = 0.0)
        : rows(r), dim(d), data(r * d, fill) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * dim, dim};
    }
};

using EntityTable = ParamTable;
using RelationTable = ParamTable;

struct TripleGradient {
    std::vector<double> d_subject;
    std::vector<double> d_relation;
    std::vector<double> d_object;
};

// i.i.d. uniform on [-0.01, 0.01]; deterministic for a fixed seed, entity
// table filled before the relation table.
std::pair<EntityTable, RelationTable> init_params(const ModelConfig& config,
                                                  std::size_t num_entities,
                                                  std::size_t num_relations,
                                                  std::uint64_t seed);

// Packed almost-diagonal layout: params = [d_1..d_n, (x_1,y_1), ...].
// Entity coordinates pair up as (v[n+2j], v[n+2j+1]) against block j.
double score_analogy(std::span<const double> s, std::span<const double> r,
                     std::span<const double> o, std::size_t n);
double score_distmult(std::span<const double> s, std::span<const double> r,
                      std::span<const double> o);
double score_complex(std::span<const double> s, std::span<const double> r,
                     std::span<const double> o);
double score_hole(std::span<const double> s, std::span<const double> r,
                  std::span<const double> o);

double score_triple(ModelKind kind, std::span<const double> s, std::span<const double> r,
                    std::span<const double> o, std::size_t n);

// Analytic d(phi)/d(s_vec, r_params, o_vec); O(m) except hole (O(m^2)).
void grad_triple(ModelKind kind, std::span<const double> s, std::span<const double> r,
                 std::span<const double> o, std::size_t n, TripleGradient& out);
TripleGradient grad_triple(ModelKind kind, std::span<const double> s,
                           std::span<const double> r, std::span<const double> o,
                           std::size_t n);

// Dense m x m matrix of a packed relation row; zero off-block entries.
Matrix expand_block_diag(std::span<const double> params, std::size_t m, std::size_t n);

// C(x)[i][j] = x[(i - j) mod m]; first column is x itself.
Matrix make_circulant(std::span<const double> x);

struct Model {
    ModelConfig config;
    EntityTable entities;
    RelationTable relations;

    std::size_t num_entities() const { return entities.rows; }
    std::size_t num_relations() const { return relations.rows; }

    double score(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
        return score_triple(config.kind, entities.row(s), relations.row(r),
                            entities.row(o), config.num_scalars);
    }
    void grad(std::uint32_t s, std::uint32_t r, std::uint32_t o, TripleGradient& out) const {
        grad_triple(config.kind, entities.row(s), relations.row(r), entities.row(o),
                    config.num_scalars, out);
    }
};

Model make_model(const ModelConfig& config, std::size_t num_entities,
                 std::size_t num_relations, std::uint64_t seed);

}  // namespace kge
