#pragma once

#include <cstddef>
#include <vector>

namespace ict {

/// Dense row-major matrix of doubles. Batches are stored one sample per row.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    bool all_finite() const;
};

/// Element-wise convex combination lam*a + (1-lam)*b.
/// Throws std::invalid_argument on shape mismatch.
Matrix mix(const Matrix& a, const Matrix& b, double lam);

} // namespace ict
