#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "vnsum/error.hpp"

namespace vnsum {

// Dense row-major matrix of doubles. Rows are observations (sentences),
// columns are features.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double> row_copy(std::size_t r) const {
        return {row(r), row(r) + cols_};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const double* a, std::size_t n) {
    return std::sqrt(dot(a, a, n));
}

inline double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Cosine similarity; raises ZeroNorm when either vector has zero magnitude.
inline double cosine_similarity(const double* a, const double* b, std::size_t n) {
    const double na = l2_norm(a, n);
    const double nb = l2_norm(b, n);
    if (na == 0.0 || nb == 0.0) {
        raise(Errc::zero_norm, "cosine similarity of a zero-magnitude vector");
    }
    return dot(a, b, n) / (na * nb);
}

}  // namespace vnsum
