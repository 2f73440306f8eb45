// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/matrix.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "json_support.hpp"
#include "timegrain/errors.hpp"

namespace timegrain {

namespace {

void check_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ArgumentError("matrix value is not finite");
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw ShapeError("matrix value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    check_finite(values_);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::span<const double> Matrix::row(std::size_t r) const {
    if (r >= rows_) throw ShapeError("row index out of range");
    return {values_.data() + r * cols_, cols_};
}

std::span<double> Matrix::row(std::size_t r) {
    if (r >= rows_) throw ShapeError("row index out of range");
    return {values_.data() + r * cols_, cols_};
}

std::string Matrix::to_json() const {
    return matrix_to_json(*this).dump();
}

Matrix Matrix::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    return matrix_from_json(j);
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("values")) {
        throw ParseError("matrix JSON requires rows, cols, values");
    }
    if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned() || !j["values"].is_array()) {
        throw ParseError("matrix JSON field types are wrong");
    }
    std::vector<double> values;
    values.reserve(j["values"].size());
    for (const auto& v : j["values"]) {
        if (!v.is_number()) throw ParseError("matrix values must be numbers");
        values.push_back(v.get<double>());
    }
    const auto rows = j["rows"].get<std::size_t>();
    const auto cols = j["cols"].get<std::size_t>();
    if (values.size() != rows * cols) {
        throw ParseError("matrix JSON value count " + std::to_string(values.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    return Matrix(rows, cols, std::move(values));
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["values"] = m.values();
    return j;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t jj = 0; jj < b.cols(); ++jj) {
                out(i, jj) += aik * b(k, jj);
            }
        }
    }
    return out;
}

Matrix softmax_rows(const Matrix& a) {
    if (a.empty()) return a;
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t jj = 0; jj < a.cols(); ++jj) mx = std::max(mx, a(i, jj));
        double sum = 0.0;
        for (std::size_t jj = 0; jj < a.cols(); ++jj) {
            const double e = std::exp(a(i, jj) - mx);
            out(i, jj) = e;
            sum += e;
        }
        for (std::size_t jj = 0; jj < a.cols(); ++jj) out(i, jj) /= sum;
    }
    return out;
}

Matrix mean_over_stack(std::span<const Matrix> ms) {
    if (ms.empty()) throw ArgumentError("mean_over_stack: empty stack");
    const std::size_t r = ms[0].rows();
    const std::size_t c = ms[0].cols();
    Matrix out(r, c);
    for (const Matrix& m : ms) {
        if (m.rows() != r || m.cols() != c) throw ShapeError("mean_over_stack: shapes differ");
        for (std::size_t i = 0; i < r * c; ++i) {
            out(i / c, i % c) += m(i / c, i % c);
        }
    }
    const double inv = 1.0 / static_cast<double>(ms.size());
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t jj = 0; jj < c; ++jj) out(i, jj) *= inv;
    }
    return out;
}

double dot(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ShapeError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

} // namespace timegrain
