// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace timegrain {

/// Dense row-major matrix of doubles.
///
/// Values are validated finite when constructed from user-supplied data and
/// every operation is a pure function, so instances are safe to share across
/// threads without coordination.
class Matrix {
public:
    Matrix() = default;

    // Zero-filled rows x cols.
    Matrix(std::size_t rows, std::size_t cols);

    // Takes ownership of row-major values; size and finiteness are checked.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);

    const std::vector<double>& values() const { return values_; }

    bool operator==(const Matrix&) const = default;

    // {"rows": r, "cols": c, "values": [...]}; the canonical golden-file form.
    std::string to_json() const;
    static Matrix from_json(const std::string& text);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// Standard product; a.cols must equal b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

// Row-wise softmax, stabilized by per-row max subtraction. Empty matrices
// pass through.
Matrix softmax_rows(const Matrix& a);

// Element-wise arithmetic mean of a non-empty stack of same-shaped matrices.
Matrix mean_over_stack(std::span<const Matrix> ms);

double dot(std::span<const double> u, std::span<const double> v);

} // namespace timegrain
