// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "timegrain/errors.hpp"
#include "timegrain/matrix.hpp"
#include "timegrain/rng.hpp"

using timegrain::ArgumentError;
using timegrain::Matrix;
using timegrain::ShapeError;

TEST_CASE("construction and element access") {
    Matrix z(2, 3);
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 3);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(z(r, c) == 0.0);
    }

    Matrix m(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 3.0);

    CHECK(Matrix().empty());
    CHECK_FALSE(m.empty());
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    ArgumentError);
    CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), ArgumentError);
}

TEST_CASE("identity") {
    const Matrix i = Matrix::identity(3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(i(r, c) == (r == c ? 1.0 : 0.0));
    }
}

TEST_CASE("row spans") {
    Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
    const auto row = m.row(1);
    REQUIRE(row.size() == 3);
    CHECK(row[0] == 4.0);
    CHECK(row[2] == 6.0);
    CHECK_THROWS_AS(m.row(2), ShapeError);
}

TEST_CASE("matmul matches hand computation") {
    const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b(3, 2, {7, 8, 9, 10, 11, 12});
    const Matrix c = matmul(a, b);
    REQUIRE(c.rows() == 2);
    REQUIRE(c.cols() == 2);
    CHECK(c(0, 0) == 58.0);
    CHECK(c(0, 1) == 64.0);
    CHECK(c(1, 0) == 139.0);
    CHECK(c(1, 1) == 154.0);
}

TEST_CASE("matmul against plain loops on random matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t k = 1 + rng() % 8;
        const std::size_t m = 1 + rng() % 8;
        Matrix a(n, k), b(k, m);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < k; ++c) a(r, c) = timegrain::uniform_symmetric(rng);
        }
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < m; ++c) b(r, c) = timegrain::uniform_symmetric(rng);
        }
        const Matrix got = matmul(a, b);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                double want = 0.0;
                for (std::size_t x = 0; x < k; ++x) want += a(r, x) * b(x, c);
                CHECK(got(r, c) == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("matmul shape mismatch") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
}

TEST_CASE("softmax rows sum to one and survive large logits") {
    Matrix m(2, 3, {1000.0, 1001.0, 1002.0, -1000.0, 0.0, 3.0});
    const Matrix s = softmax_rows(m);
    for (std::size_t r = 0; r < 2; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(s(r, c) >= 0.0);
            CHECK(s(r, c) <= 1.0);
            sum += s(r, c);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Row one is shifted to {-2, -1, 0}: every entry stays positive.
    for (std::size_t c = 0; c < 3; ++c) CHECK(s(0, c) > 0.0);
    // Row two: exp(3) dominates and exp(-1003) underflows to exactly zero.
    CHECK(s(1, 2) > 0.9);
    CHECK(s(1, 0) == 0.0);
}

TEST_CASE("softmax of uniform logits is uniform") {
    const Matrix s = softmax_rows(Matrix(1, 4, {5.0, 5.0, 5.0, 5.0}));
    for (std::size_t c = 0; c < 4; ++c) CHECK(s(0, c) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("mean_over_stack") {
    const Matrix a(1, 2, {1.0, 2.0});
    const Matrix b(1, 2, {3.0, 6.0});
    const std::vector<Matrix> ms{a, b};
    const Matrix mean = mean_over_stack(ms);
    CHECK(mean(0, 0) == 2.0);
    CHECK(mean(0, 1) == 4.0);

    CHECK_THROWS_AS(mean_over_stack(std::span<const Matrix>{}), ArgumentError);
    const std::vector<Matrix> bad{a, Matrix(2, 2)};
    CHECK_THROWS_AS(mean_over_stack(bad), ShapeError);
}

TEST_CASE("dot") {
    const std::vector<double> u{1.0, 2.0, 3.0};
    const std::vector<double> v{4.0, 5.0, 6.0};
    CHECK(timegrain::dot(u, v) == 32.0);
    const std::vector<double> w{1.0};
    CHECK_THROWS_AS(timegrain::dot(u, w), ShapeError);
}

TEST_CASE("JSON round trip is exact") {
    std::mt19937_64 rng(7);
    Matrix m(3, 4);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 4; ++c) m(r, c) = timegrain::uniform_symmetric(rng) * 1e3;
    }
    const Matrix back = Matrix::from_json(m.to_json());
    CHECK(back == m);

    CHECK_THROWS_AS(Matrix::from_json("not json"), timegrain::ParseError);
    CHECK_THROWS_AS(Matrix::from_json(R"({"rows": 2, "cols": 2, "values": [1.0]})"),
                    timegrain::ParseError);
}
