#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kge/common.hpp"

namespace kge {

// Dense row-major matrix. Sized for the spectral toolkit (m <= 512), not for
// embedding tables, which live in flat ParamTables.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }

    static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix sub(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

// A = V diag(values) V^T for symmetric A; columns of `vectors` are the
// eigenvectors, `values` unsorted.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

// Cyclic Jacobi rotations. Input must be symmetric.
SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 64);

// Random orthogonal matrix: Gram-Schmidt on a Gaussian sample.
Matrix random_orthogonal(std::size_t n, Rng& rng);

}  // namespace kge
