#include "kge/linalg.hpp"

#include <cmath>
#include <cstdio>

namespace kge {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; i++) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw DimensionError("matmul: incompatible shapes");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; i++) {
        for (std::size_t k = 0; k < a.cols; k++) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; j++) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; i++)
        for (std::size_t j = 0; j < a.cols; j++) t(j, i) = a(i, j);
    return t;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw DimensionError("sub: incompatible shapes");
    Matrix c(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); i++) c.data[i] = a.data[i] - b.data[i];
    return c;
}

double frobenius_norm(const Matrix& a) {
    double s = 0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double s = 0;
    for (double v : a.data) s = std::max(s, std::fabs(v));
    return s;
}

SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps) {
    if (a.rows != a.cols) throw DimensionError("jacobi_eigen: non-square input");
    const std::size_t n = a.rows;
    Matrix v = Matrix::identity(n);
    const double scale = std::max(1e-300, frobenius_norm(a));

    for (int sweep = 0; sweep < max_sweeps; sweep++) {
        double off = 0;
        for (std::size_t i = 0; i < n; i++)
            for (std::size_t j = i + 1; j < n; j++) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; p++) {
            for (std::size_t q = p + 1; q < n; q++) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-18 * scale) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; i++) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(p, i) = a(i, p);
                    a(i, q) = s * aip + c * aiq;
                    a(q, i) = a(i, q);
                }
                for (std::size_t i = 0; i < n; i++) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; i++) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

Matrix random_orthogonal(std::size_t n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix q(n, n);
    for (std::size_t col = 0; col < n; col++) {
        std::vector<double> x(n);
        while (true) {
            for (auto& e : x) e = gauss(rng);
            // two Gram-Schmidt passes keep orthogonality near machine precision
            for (int pass = 0; pass < 2; pass++) {
                for (std::size_t k = 0; k < col; k++) {
                    double dot = 0;
                    for (std::size_t i = 0; i < n; i++) dot += q(i, k) * x[i];
                    for (std::size_t i = 0; i < n; i++) x[i] -= dot * q(i, k);
                }
            }
            double norm = 0;
            for (double e : x) norm += e * e;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (std::size_t i = 0; i < n; i++) q(i, col) = x[i] / norm;
                break;
            }
        }
    }
    return q;
}

}  // namespace kge
