#include "kge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "kge/triples.hpp"

namespace kge {

namespace {

std::string fmt_residual(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace

std::size_t BlockLayout::dim() const {
    std::size_t d = 0;
    for (BlockKind b : blocks) d += b == BlockKind::scalar ? 1 : 2;
    return d;
}

std::size_t BlockLayout::num_scalars() const {
    std::size_t n = 0;
    for (BlockKind b : blocks) n += b == BlockKind::scalar;
    return n;
}

double normality_residual(const Matrix& a) {
    if (a.rows != a.cols) throw DimensionError("is_normal: non-square input");
    const Matrix at = transpose(a);
    const double nf = frobenius_norm(a);
    return frobenius_norm(sub(matmul(a, at), matmul(at, a))) / std::max(1.0, nf * nf);
}

bool is_normal(const Matrix& a, double tol) { return normality_residual(a) <= tol; }

double commutator_residual(const Matrix& a, const Matrix& b) {
    if (a.rows != a.cols || b.rows != b.cols || a.rows != b.rows)
        throw DimensionError("commutes: dimension mismatch");
    return frobenius_norm(sub(matmul(a, b), matmul(b, a))) /
           std::max(1.0, frobenius_norm(a) * frobenius_norm(b));
}

bool commutes(const Matrix& a, const Matrix& b, double tol) {
    return commutator_residual(a, b) <= tol;
}

namespace {

struct ScalarColumn {
    double alpha;
    std::vector<double> vec;
};

struct PairColumns {
    double alpha;
    double beta;
    std::vector<double> e1, e2;
};

std::vector<double> column_of(const Matrix& m, std::size_t j) {
    std::vector<double> c(m.rows);
    for (std::size_t i = 0; i < m.rows; i++) c[i] = m(i, j);
    return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double c, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); i++) y[i] += c * x[i];
}

// y = M x for the dense column vector x
std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; i++) {
        double acc = 0;
        for (std::size_t j = 0; j < m.cols; j++) acc += m(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

// Orthonormalizes `vec` against the columns in `basis` (two passes); returns
// the residual norm before final normalization, 0 if it vanished.
double orthonormalize_against(std::vector<double>& vec,
                              const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; pass++) {
        for (const auto& b : basis) axpy(-dot(b, vec), b, vec);
    }
    const double n = norm(vec);
    if (n < 1e-8) return 0.0;
    for (auto& v : vec) v /= n;
    return n;
}

// One attempt of the construction for a particular random combination M.
// Returns false when the draw was degenerate (odd pairing group, vanished
// vectors); the caller retries with fresh coefficients.
bool attempt_decomposition(std::span<const Matrix> family, const std::vector<double>& coeffs,
                           std::vector<ScalarColumn>& scalars, std::vector<PairColumns>& pairs) {
    const std::size_t m = family[0].rows;
    scalars.clear();
    pairs.clear();

    Matrix combo(m, m);
    for (std::size_t f = 0; f < family.size(); f++)
        for (std::size_t i = 0; i < m * m; i++)
            combo.data[i] += coeffs[f] * family[f].data[i];

    Matrix sym(m, m), skew(m, m);
    for (std::size_t i = 0; i < m; i++) {
        for (std::size_t j = 0; j < m; j++) {
            sym(i, j) = 0.5 * (combo(i, j) + combo(j, i));
            skew(i, j) = 0.5 * (combo(i, j) - combo(j, i));
        }
    }

    const double scale = std::max(1.0, frobenius_norm(combo));
    const double gap = 1e-8 * scale;  // eigenvalue clustering / pairing tolerance

    SymmetricEigen se = jacobi_eigen(sym);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return se.values[a] < se.values[b]; });

    std::size_t start = 0;
    while (start < m) {
        std::size_t end = start + 1;
        while (end < m && se.values[idx[end]] - se.values[idx[end - 1]] <= gap) end++;
        const std::size_t d = end - start;

        double alpha = 0;
        for (std::size_t i = start; i < end; i++) alpha += se.values[idx[i]];
        alpha /= static_cast<double>(d);

        // cluster basis U_c and the skew part restricted to it
        std::vector<std::vector<double>> uc(d);
        for (std::size_t i = 0; i < d; i++) uc[i] = column_of(se.vectors, idx[start + i]);

        if (d == 1) {
            scalars.push_back({alpha, std::move(uc[0])});
            start = end;
            continue;
        }

        Matrix kc(d, d);
        std::vector<std::vector<double>> k_uc(d);
        for (std::size_t j = 0; j < d; j++) k_uc[j] = matvec(skew, uc[j]);
        for (std::size_t i = 0; i < d; i++)
            for (std::size_t j = 0; j < d; j++) kc(i, j) = dot(uc[i], k_uc[j]);
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t j = i; j < d; j++) {
                const double v = 0.5 * (kc(i, j) - kc(j, i));
                kc(i, j) = v;
                kc(j, i) = -v;
            }
        }

        // -Kc^2 is symmetric PSD; its eigenvalues are the squared rotation
        // rates beta^2 inside this cluster
        Matrix p = matmul(transpose(kc), kc);
        for (std::size_t i = 0; i < d; i++)
            for (std::size_t j = i + 1; j < d; j++) {
                const double v = 0.5 * (p(i, j) + p(j, i));
                p(i, j) = v;
                p(j, i) = v;
            }
        SymmetricEigen pe = jacobi_eigen(std::move(p));

        std::vector<std::size_t> pidx(d);
        std::iota(pidx.begin(), pidx.end(), 0u);
        std::sort(pidx.begin(), pidx.end(), [&](std::size_t a, std::size_t b) {
            return pe.values[a] < pe.values[b];
        });
        std::vector<double> betas(d);
        for (std::size_t i = 0; i < d; i++)
            betas[i] = std::sqrt(std::max(0.0, pe.values[pidx[i]]));

        auto lift = [&](std::span<const double> w) {
            std::vector<double> full(m, 0.0);
            for (std::size_t j = 0; j < d; j++) axpy(w[j], uc[j], full);
            return full;
        };

        std::size_t bs = 0;
        while (bs < d) {
            std::size_t be = bs + 1;
            while (be < d && betas[be] - betas[be - 1] <= gap) be++;

            double beta = 0;
            for (std::size_t i = bs; i < be; i++) beta += betas[i];
            beta /= static_cast<double>(be - bs);

            if (beta <= gap) {
                // zero rotation rate: real eigenvectors, scalar blocks
                for (std::size_t i = bs; i < be; i++)
                    scalars.push_back({alpha, lift(column_of(pe.vectors, pidx[i]))});
                bs = be;
                continue;
            }

            if ((be - bs) % 2 != 0) return false;

            // greedy pairing inside the beta eigenspace: e2 = Kc e1 / beta
            std::vector<std::vector<double>> group;
            for (std::size_t i = bs; i < be; i++) group.push_back(column_of(pe.vectors, pidx[i]));
            std::vector<std::vector<double>> consumed;
            while (consumed.size() < group.size()) {
                std::vector<double> e1;
                for (auto& cand : group) {
                    std::vector<double> trial = cand;
                    if (orthonormalize_against(trial, consumed) > 0.3) {
                        e1 = std::move(trial);
                        break;
                    }
                }
                if (e1.empty()) return false;
                std::vector<double> e2 = matvec(kc, e1);
                for (auto& v : e2) v /= beta;
                axpy(-dot(e1, e2), e1, e2);  // should already be orthogonal
                const double n2 = norm(e2);
                if (n2 < 0.5) return false;
                for (auto& v : e2) v /= n2;
                if (orthonormalize_against(e2, consumed) == 0.0 && !consumed.empty())
                    return false;
                pairs.push_back({alpha, beta, lift(e1), lift(e2)});
                consumed.push_back(std::move(e1));
                consumed.push_back(std::move(e2));
            }
            bs = be;
        }
        start = end;
    }
    return true;
}

}  // namespace

SimulDiagResult simul_block_diagonalize(std::span<const Matrix> family, double tol) {
    if (family.empty()) throw SpectralError("empty matrix family");
    const std::size_t m = family[0].rows;
    for (const auto& a : family) {
        if (a.rows != m || a.cols != m)
            throw SpectralError("family members must share one square dimension");
        const double res = normality_residual(a);
        if (res > tol)
            throw SpectralError("precondition failed: matrix is not normal (residual " +
                                fmt_residual(res) + " > tol)");
    }
    for (std::size_t i = 0; i < family.size(); i++) {
        for (std::size_t j = i + 1; j < family.size(); j++) {
            const double res = commutator_residual(family[i], family[j]);
            if (res > tol)
                throw SpectralError("precondition failed: matrices " + std::to_string(i) +
                                    " and " + std::to_string(j) +
                                    " do not commute (residual " + fmt_residual(res) +
                                    " > tol)");
        }
    }

    SimulDiagResult best;
    double best_residual = std::numeric_limits<double>::infinity();

    for (int attempt = 0; attempt < 5; attempt++) {
        Rng rng(mix_seed(0x57ec7ull, 0, attempt));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> coeffs(family.size());
        for (auto& c : coeffs) c = unif(rng);

        std::vector<ScalarColumn> scalars;
        std::vector<PairColumns> pair_cols;
        if (!attempt_decomposition(family, coeffs, scalars, pair_cols)) continue;

        std::sort(scalars.begin(), scalars.end(),
                  [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
        std::sort(pair_cols.begin(), pair_cols.end(), [](const auto& a, const auto& b) {
            return a.alpha != b.alpha ? a.alpha < b.alpha : a.beta < b.beta;
        });

        const std::size_t n = scalars.size();
        if (n + 2 * pair_cols.size() != m) continue;

        SimulDiagResult result;
        result.attempts = attempt + 1;
        result.layout.blocks.assign(n, BlockKind::scalar);
        result.layout.blocks.insert(result.layout.blocks.end(), pair_cols.size(),
                                    BlockKind::pair);

        // realified columns: scalar eigenvectors, then sqrt(2)Re(q), sqrt(2)Im(q)
        // per conjugate pair q = (e1 - i e2)/sqrt(2)
        Matrix q(m, m);
        std::vector<std::vector<double>> cols;
        cols.reserve(m);
        for (auto& sc : scalars) cols.push_back(std::move(sc.vec));
        for (auto& pc : pair_cols) {
            cols.push_back(pc.e1);
            cols.push_back(pc.e2);
            ConjugateEigenPair pair;
            pair.alpha = pc.alpha;
            pair.beta = pc.beta;
            pair.real_part.resize(m);
            pair.imag_part.resize(m);
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for (std::size_t i = 0; i < m; i++) {
                pair.real_part[i] = pc.e1[i] * inv_sqrt2;
                pair.imag_part[i] = -pc.e2[i] * inv_sqrt2;
            }
            result.conjugate_pairs.push_back(std::move(pair));
        }

        // final re-orthonormalization pass
        bool ok = true;
        std::vector<std::vector<double>> ortho;
        ortho.reserve(m);
        for (auto& c : cols) {
            if (orthonormalize_against(c, ortho) == 0.0 && !ortho.empty()) {
                ok = false;
                break;
            }
            const double nn = norm(c);
            if (nn < 0.5) {
                ok = false;
                break;
            }
            for (auto& v : c) v /= nn;
            ortho.push_back(std::move(c));
        }
        if (!ok || ortho.size() != m) continue;
        for (std::size_t j = 0; j < m; j++)
            for (std::size_t i = 0; i < m; i++) q(i, j) = ortho[j][i];

        result.basis.q = std::move(q);
        result.orthogonality_residual = frobenius_norm(
            sub(matmul(transpose(result.basis.q), result.basis.q), Matrix::identity(m)));

        // read packed blocks off Q^T A_i Q and project pairs to canonical form
        const Matrix qt = transpose(result.basis.q);
        double max_recon = 0, max_proj = 0;
        result.packed.clear();
        for (const auto& a : family) {
            const Matrix t = matmul(qt, matmul(a, result.basis.q));
            std::vector<double> packed(m, 0.0);
            for (std::size_t j = 0; j < n; j++) packed[j] = t(j, j);
            for (std::size_t j = n; j + 1 < m; j += 2) {
                packed[j] = 0.5 * (t(j, j) + t(j + 1, j + 1));
                packed[j + 1] = 0.5 * (t(j + 1, j) - t(j, j + 1));
                const double scale_a = std::max(1.0, frobenius_norm(a));
                max_proj = std::max(max_proj,
                                    0.5 * std::fabs(t(j, j) - t(j + 1, j + 1)) / scale_a);
                max_proj = std::max(max_proj,
                                    0.5 * std::fabs(t(j, j + 1) + t(j + 1, j)) / scale_a);
            }
            const Matrix recon =
                matmul(result.basis.q, matmul(expand_block_diag(packed, m, n), qt));
            const double a_norm = frobenius_norm(a);
            const double resid = frobenius_norm(sub(a, recon)) / std::max(1e-300, a_norm);
            max_recon = std::max(max_recon, a_norm == 0.0 ? 0.0 : resid);
            result.packed.push_back(std::move(packed));
        }
        result.max_reconstruction_residual = max_recon;
        result.projection_residual = max_proj;

        if (max_recon < best_residual) {
            best_residual = max_recon;
            best = result;
        }
        if (max_recon <= 10 * tol && max_proj <= tol &&
            result.orthogonality_residual <= 1e-10 * m)
            return best;
    }

    throw SpectralError(
        "block-diagonalization failed after 5 attempts (best residual " +
        fmt_residual(best_residual) + ", tol " + fmt_residual(tol) + ")");
}

EquivalenceReport verify_score_equivalence(const EntityTable& v,
                                               std::span<const Matrix> relation_maps,
                                               std::span<const Triple> triples, double tol) {
    if (relation_maps.empty()) throw SpectralError("empty relation family");
    const std::size_t m = relation_maps[0].rows;
    if (v.dim != m) throw DimensionError("entity table dimension mismatch");

    SimulDiagResult diag = simul_block_diagonalize(relation_maps, tol);
    const std::size_t n = diag.layout.num_scalars();

    // u = v Q, row by row
    EntityTable u(v.rows, m);
    for (std::size_t e = 0; e < v.rows; e++) {
        auto ve = v.row(e);
        auto ue = u.row(e);
        for (std::size_t j = 0; j < m; j++) {
            double acc = 0;
            for (std::size_t i = 0; i < m; i++) acc += ve[i] * diag.basis.q(i, j);
            ue[j] = acc;
        }
    }

    double max_dev = 0;
    for (const auto& t : triples) {
        if (t.s >= v.rows || t.o >= v.rows || t.r >= relation_maps.size())
            throw DimensionError("triple index out of range");
        auto vs = v.row(t.s);
        auto vo = v.row(t.o);
        const Matrix& w = relation_maps[t.r];
        double dense = 0;
        for (std::size_t i = 0; i < m; i++) {
            double acc = 0;
            for (std::size_t j = 0; j < m; j++) acc += w(i, j) * vo[j];
            dense += vs[i] * acc;
        }
        const double packed = score_analogy(u.row(t.s), diag.packed[t.r], u.row(t.o), n);
        max_dev = std::max(max_dev, std::fabs(dense - packed));
    }

    EquivalenceReport report;
    report.max_score_deviation = max_dev;
    report.reconstruction_residual = diag.max_reconstruction_residual;
    report.orthogonality_residual = diag.orthogonality_residual;
    report.tol = tol;
    report.passed = max_dev <= tol;
    return report;
}

double dft_complex_score_oracle(std::span<const double> s, std::span<const double> r,
                                std::span<const double> o) {
    if (s.size() != r.size() || s.size() != o.size())
        throw DimensionError("dft oracle: length mismatch");
    const std::size_t m = s.size();
    if (m == 0) throw DimensionError("dft oracle: empty input");

    const double two_pi = 2.0 * std::acos(-1.0);
    std::complex<double> total = 0;
    for (std::size_t k = 0; k < m; k++) {
        std::complex<double> sh = 0, rh = 0, oh = 0;
        for (std::size_t j = 0; j < m; j++) {
            const double angle = -two_pi * static_cast<double>(j * k % m) / static_cast<double>(m);
            const std::complex<double> w(std::cos(angle), std::sin(angle));
            sh += s[j] * w;
            rh += r[j] * w;
            oh += o[j] * w;
        }
        total += std::conj(sh) * rh * oh;
    }
    return total.real() / static_cast<double>(m);
}

std::vector<Matrix> load_matrix_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::size_t m = 0, k = 0;
    if (!(in >> m >> k) || m == 0 || k == 0)
        throw ParseError(path + ": expected header 'm k'");
    if (m > 512) throw ParseError(path + ": dimension exceeds supported size 512");
    std::vector<Matrix> family;
    family.reserve(k);
    for (std::size_t f = 0; f < k; f++) {
        Matrix a(m, m);
        for (std::size_t i = 0; i < m * m; i++) {
            if (!(in >> a.data[i]))
                throw ParseError(path + ": truncated matrix " + std::to_string(f));
        }
        family.push_back(std::move(a));
    }
    return family;
}

void save_matrix_family(const std::string& path, std::span<const Matrix> family) {
    if (family.empty()) throw IoError("refusing to write empty family");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    const std::size_t m = family[0].rows;
    out << m << ' ' << family.size() << '\n';
    out.precision(17);
    for (const auto& a : family) {
        if (a.rows != m || a.cols != m) throw DimensionError("family dimension mismatch");
        for (std::size_t i = 0; i < m; i++) {
            for (std::size_t j = 0; j < m; j++) {
                if (j) out << ' ';
                out << a(i, j);
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("short write to " + path);
}

}  // namespace kge
