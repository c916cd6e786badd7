#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kge/linalg.hpp"
#include "kge/model.hpp"
#include "kge/triples.hpp"

namespace kge {

// Spectral toolkit for commuting normal relation maps.
//
// A family of real normal matrices that pairwise commute shares one real
// orthogonal basis Q in which every member becomes almost-diagonal: scalar
// blocks for real eigenvalues plus 2x2 blocks [[x,-y],[y,x]] for conjugate
// eigenvalue pairs. simul_block_diagonalize constructs that basis:
//
//   1. draw a random combination M = sum c_i A_i (generic c), itself normal;
//   2. compute M's complex eigendecomposition. For a normal M this is done
//      exactly through its commuting symmetric/skew parts S = (M+M^T)/2 and
//      K = (M-M^T)/2: eigenspaces of S, then the canonical form of K inside
//      each, yield eigenvalues alpha +- beta*i with conjugate eigenvectors
//      q = (e1 -+ i e2)/sqrt(2);
//   3. conjugate pairs realify into the unit columns sqrt(2)*Re(q) and
//      sqrt(2)*Im(q); real eigenvalues keep their real eigenvectors;
//   4. columns are re-orthonormalized and the packed blocks are read off
//      Q^T A_i Q, scalars first, then pairs (the packed relation layout).
//
// Residuals are verified afterwards; a degenerate draw of c is retried with
// fresh coefficients (up to 5 attempts).

using DenseRelation = Matrix;

struct OrthogonalBasis {
    Matrix q;
};

enum class BlockKind : std::uint8_t { scalar, pair };

struct BlockLayout {
    std::vector<BlockKind> blocks;  // scalars first, then 2x2 pairs

    std::size_t dim() const;
    std::size_t num_scalars() const;
};

// Intermediate conjugate eigenpair q = a + b*i of the random combination,
// eigenvalue alpha + beta*i (beta > 0). For a unit complex eigenvector the
// parts satisfy |a|^2 = |b|^2 = 1/2 and a.b = 0.
struct ConjugateEigenPair {
    double alpha = 0;
    double beta = 0;
    std::vector<double> real_part;
    std::vector<double> imag_part;
};

struct SimulDiagResult {
    OrthogonalBasis basis;
    std::vector<std::vector<double>> packed;  // per input matrix, packed layout
    BlockLayout layout;
    std::vector<ConjugateEigenPair> conjugate_pairs;
    double max_reconstruction_residual = 0;  // max_i |A_i - Q B_i Q^T|_F / |A_i|_F
    double projection_residual = 0;          // worst 2x2 canonical-form deviation
    double orthogonality_residual = 0;       // |Q^T Q - I|_F
    int attempts = 0;
};

// |A A^T - A^T A|_F <= tol * max(1, |A|_F^2)
bool is_normal(const Matrix& a, double tol);
double normality_residual(const Matrix& a);  // relative, as above

// |A B - B A|_F <= tol * max(1, |A|_F |B|_F)
bool commutes(const Matrix& a, const Matrix& b, double tol);
double commutator_residual(const Matrix& a, const Matrix& b);

// Throws SpectralError if the family is not commuting-normal at tol, or if
// no random combination yields residuals within 10*tol after 5 attempts.
SimulDiagResult simul_block_diagonalize(std::span<const Matrix> family, double tol);

struct EquivalenceReport {
    double max_score_deviation = 0;
    double reconstruction_residual = 0;
    double orthogonality_residual = 0;
    double tol = 0;
    bool passed = false;
};

// Decomposes the family, rotates the entity table (u = v Q) and compares the
// dense bilinear score v_s^T W_r v_o against the packed score u_s^T B_r u_o
// over the given triples.
EquivalenceReport verify_score_equivalence(const EntityTable& v,
                                               std::span<const Matrix> relation_maps,
                                               std::span<const Triple> triples, double tol);

// Fourier-domain evaluation of the circulant bilinear form:
// (1/m) * Re(sum_k conj(DFT(s)_k) DFT(r)_k DFT(o)_k). Independent oracle for
// score_hole.
double dft_complex_score_oracle(std::span<const double> s, std::span<const double> r,
                                std::span<const double> o);

// Matrix family text format: first line "m k", then k*m rows of m decimals.
std::vector<Matrix> load_matrix_family(const std::string& path);
void save_matrix_family(const std::string& path, std::span<const Matrix> family);

}  // namespace kge
