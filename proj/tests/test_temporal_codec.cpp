// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "timegrain/errors.hpp"
#include "timegrain/rng.hpp"
#include "timegrain/temporal_codec.hpp"

using namespace timegrain;

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.values().data(), b.values().data(),
                       a.values().size() * sizeof(double)) == 0;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = uniform_symmetric(rng) * 3.0;
    }
    return m;
}

} // namespace

TEST_CASE("quantize hand values") {
    CHECK(quantize(0.0) == 0);
    CHECK(quantize(-0.0) == 0);
    CHECK(quantize(2.5) == 25);
    CHECK(quantize(2.55) == 26);  // decimal half-up on the rendered string
    CHECK(quantize(0.05) == 1);
    CHECK(quantize(0.04) == 0);
    CHECK(quantize(0.06) == 1);
    CHECK(quantize(0.25) == 3);
    CHECK(quantize(0.15) == 2);
    CHECK(quantize(1.05) == 11);
    CHECK(quantize(9.999) == 100);
    CHECK(quantize(123.456) == 1235);
    CHECK(quantize(16.4) == 164);
    CHECK(quantize(120.5) == 1205);
    CHECK(quantize(0.001) == 0);
    CHECK(quantize(1e-20) == 0);
    CHECK(quantize(999.95) == 10000);
}

TEST_CASE("quantize domain errors") {
    CHECK_THROWS_AS(quantize(-0.1), ArgumentError);
    CHECK_THROWS_AS(quantize(std::numeric_limits<double>::quiet_NaN()), ArgumentError);
    CHECK_THROWS_AS(quantize(std::numeric_limits<double>::infinity()), ArgumentError);
    CHECK_THROWS_AS(quantize(-std::numeric_limits<double>::infinity()), ArgumentError);
    // 18 integer digits fit, 19 do not.
    CHECK(quantize(1e17) == TimestampTenths{1000000000000000000u});
    CHECK_THROWS_AS(quantize(1e18), ArgumentError);
    CHECK_THROWS_AS(quantize(std::numeric_limits<double>::max()), ArgumentError);
}

TEST_CASE("quantize agrees with the digit-arithmetic oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20000; ++i) {
        const double base = uniform_unit(rng) * 1000.0;
        CHECK(quantize(base) == oracle::quantize_tenths(base));
    }
    // Spread over magnitudes, including subtenth and large values.
    for (int i = 0; i < 5000; ++i) {
        const double x = uniform_unit(rng);
        const double scaled = x * std::pow(10.0, static_cast<double>(rng() % 9) - 4.0);
        CHECK(quantize(scaled) == oracle::quantize_tenths(scaled));
    }
}

TEST_CASE("quantize error is at most half a tenth") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20000; ++i) {
        const double x = uniform_unit(rng) * 1000.0;
        const double back = tenths_to_seconds(quantize(x));
        CHECK(std::abs(back - x) <= 0.05 + 1e-9);
    }
}

TEST_CASE("render_tenths") {
    CHECK(render_tenths(0) == "0.0");
    CHECK(render_tenths(1) == "0.1");
    CHECK(render_tenths(26) == "2.6");
    CHECK(render_tenths(100) == "10.0");
    CHECK(render_tenths(1234) == "123.4");
    CHECK(render_tenths(10000) == "1000.0");
}

TEST_CASE("token text and parse are inverses") {
    for (int d = 0; d <= 9; ++d) {
        const TemporalToken a{TemporalToken::Kind::anchor, d};
        const TemporalToken f{TemporalToken::Kind::offset, d};
        CHECK(token_text(a) == "<a" + std::to_string(d) + ">");
        CHECK(token_text(f) == "<f" + std::to_string(d) + ">");
        CHECK(parse_token(token_text(a)) == a);
        CHECK(parse_token(token_text(f)) == f);
    }
    CHECK_THROWS_AS(token_text({TemporalToken::Kind::anchor, 10}), ArgumentError);
    CHECK_THROWS_AS(token_text({TemporalToken::Kind::offset, -1}), ArgumentError);
    CHECK_THROWS_AS(parse_token("<a>"), ParseError);
    CHECK_THROWS_AS(parse_token("<b5>"), ParseError);
    CHECK_THROWS_AS(parse_token("a5>"), ParseError);
    CHECK_THROWS_AS(parse_token("<a10>"), ParseError);
    CHECK_THROWS_AS(parse_token(""), ParseError);
}

TEST_CASE("encode_timestamp digit layout") {
    using K = TemporalToken::Kind;
    CHECK(encode_timestamp(0) == std::vector<TemporalToken>{{K::anchor, 0}, {K::offset, 0}});
    CHECK(encode_timestamp(26) == std::vector<TemporalToken>{{K::anchor, 2}, {K::offset, 6}});
    CHECK(encode_timestamp(164) ==
          std::vector<TemporalToken>{{K::anchor, 1}, {K::anchor, 6}, {K::offset, 4}});
    CHECK(encode_timestamp(1234) ==
          std::vector<TemporalToken>{
              {K::anchor, 1}, {K::anchor, 2}, {K::anchor, 3}, {K::offset, 4}});
}

TEST_CASE("encode digits agree with the oracle") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5000; ++i) {
        const TimestampTenths t = rng() % 1000000;
        const auto tokens = encode_timestamp(t);
        const auto anchors = oracle::anchor_digits(t);
        REQUIRE(tokens.size() == anchors.size() + 1);
        for (std::size_t k = 0; k < anchors.size(); ++k) {
            CHECK(tokens[k].kind == TemporalToken::Kind::anchor);
            CHECK(tokens[k].digit == anchors[k]);
        }
        CHECK(tokens.back().kind == TemporalToken::Kind::offset);
        CHECK(tokens.back().digit == oracle::offset_digit(t));
    }
}

TEST_CASE("decode_timestamp round trip and leading zeros") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 5000; ++i) {
        const TimestampTenths t = rng() % 100000;
        CHECK(decode_timestamp(encode_timestamp(t)) == t);
    }
    using K = TemporalToken::Kind;
    const std::vector<TemporalToken> padded{{K::anchor, 0}, {K::anchor, 1}, {K::offset, 5}};
    CHECK(decode_timestamp(padded) == 15);
}

TEST_CASE("decode_timestamp grammar errors") {
    using K = TemporalToken::Kind;
    CHECK_THROWS_AS(decode_timestamp(std::vector<TemporalToken>{}), ParseError);
    CHECK_THROWS_AS(decode_timestamp(std::vector<TemporalToken>{{K::offset, 5}}), ParseError);
    CHECK_THROWS_AS(decode_timestamp(std::vector<TemporalToken>{{K::anchor, 1}}), ParseError);
    CHECK_THROWS_AS(
        decode_timestamp(std::vector<TemporalToken>{{K::anchor, 1}, {K::anchor, 2}}),
        ParseError);
    CHECK_THROWS_AS(
        decode_timestamp(std::vector<TemporalToken>{{K::offset, 1}, {K::offset, 2}}),
        ParseError);
    CHECK_THROWS_AS(decode_timestamp(std::vector<TemporalToken>{
                        {K::anchor, 1}, {K::offset, 2}, {K::anchor, 3}}),
                    ParseError);
    std::vector<TemporalToken> too_long(19, {K::anchor, 1});
    too_long.push_back({K::offset, 0});
    CHECK_THROWS_AS(decode_timestamp(too_long), ParseError);
}

TEST_CASE("timestamp text forms") {
    CHECK(encode_timestamp_text(25) == "<a2><f5>");
    CHECK(encode_timestamp_text(164) == "<a1><a6><f4>");
    CHECK(encode_timestamp_text(0) == "<a0><f0>");
    CHECK(decode_timestamp_text("<a2><f5>") == 25);
    CHECK(decode_timestamp_text("<a0><a1><f5>") == 15);
    CHECK_THROWS_AS(decode_timestamp_text("<a2><f5"), ParseError);
    CHECK_THROWS_AS(decode_timestamp_text("<a2>x<f5>"), ParseError);
    CHECK_THROWS_AS(decode_timestamp_text(""), ParseError);
    CHECK_THROWS_AS(decode_timestamp_text("<f5>"), ParseError);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const TimestampTenths t = rng() % 1000000;
        CHECK(decode_timestamp_text(encode_timestamp_text(t)) == t);
    }
}

TEST_CASE("vocabulary id layout") {
    const TemporalVocabulary vocab(32000);
    CHECK(vocab.base_size() == 32000);
    CHECK(vocab.extended_size() == 32020);
    CHECK(TemporalVocabulary::extension_size == 20);
    for (int d = 0; d <= 9; ++d) {
        CHECK(vocab.digit_id(d) == static_cast<std::size_t>(d));
        CHECK(vocab.anchor_id(d) == 32000 + static_cast<std::size_t>(d));
        CHECK(vocab.offset_id(d) == 32010 + static_cast<std::size_t>(d));
        CHECK(vocab.token_id({TemporalToken::Kind::anchor, d}) == vocab.anchor_id(d));
        CHECK(vocab.token_id({TemporalToken::Kind::offset, d}) == vocab.offset_id(d));
    }
    CHECK(vocab.period_id() == 10);
    CHECK_THROWS_AS(vocab.digit_id(10), ArgumentError);
    CHECK_THROWS_AS(vocab.anchor_id(-1), ArgumentError);
    CHECK_THROWS_AS(vocab.offset_id(11), ArgumentError);
    CHECK_THROWS_AS(TemporalVocabulary(10), ConfigError);

    const TemporalVocabulary same = extend_vocabulary(32000);
    CHECK(same.base_size() == 32000);
    CHECK(same.extended_size() == 32020);
}

TEST_CASE("vocabulary with custom numeral ids") {
    std::array<std::size_t, 11> ids{};
    for (std::size_t d = 0; d < 10; ++d) ids[d] = 40 + d;
    ids[10] = 20;
    const TemporalVocabulary vocab(50, ids);
    CHECK(vocab.digit_id(3) == 43);
    CHECK(vocab.period_id() == 20);
    CHECK(vocab.anchor_id(3) == 53);
    CHECK(vocab.offset_id(7) == 67);

    std::array<std::size_t, 11> bad = ids;
    bad[4] = 50; // not inside the base vocabulary
    CHECK_THROWS_AS(TemporalVocabulary(50, bad), ConfigError);
}

TEST_CASE("extension token texts") {
    const auto texts = extension_token_texts();
    REQUIRE(texts.size() == 20);
    CHECK(texts[0] == "<a0>");
    CHECK(texts[9] == "<a9>");
    CHECK(texts[10] == "<f0>");
    CHECK(texts[19] == "<f9>");
}

TEST_CASE("embedding init copies digit rows and averages with the period row") {
    const std::size_t base = 40;
    const TemporalVocabulary vocab(base);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Matrix rows = random_matrix(base, 16, seed);
        const Matrix out = init_temporal_embeddings(rows, vocab);
        REQUIRE(out.rows() == base + 20);
        REQUIRE(out.cols() == 16);
        for (std::size_t r = 0; r < base; ++r) {
            for (std::size_t c = 0; c < 16; ++c) CHECK(out(r, c) == rows(r, c));
        }
        for (int d = 0; d <= 9; ++d) {
            for (std::size_t c = 0; c < 16; ++c) {
                // Anchor rows are bit-exact copies; offset rows are the exact
                // IEEE mean with the period row.
                CHECK(out(vocab.anchor_id(d), c) == rows(vocab.digit_id(d), c));
                CHECK(out(vocab.offset_id(d), c) ==
                      (rows(vocab.digit_id(d), c) + rows(vocab.period_id(), c)) / 2.0);
            }
        }
    }
}

TEST_CASE("embedding init under a custom numeral layout") {
    std::array<std::size_t, 11> ids{};
    for (std::size_t d = 0; d < 10; ++d) ids[d] = 12 + d;
    ids[10] = 3;
    const TemporalVocabulary vocab(30, ids);
    const Matrix rows = random_matrix(30, 5, 99);
    const Matrix out = init_temporal_embeddings(rows, vocab);
    for (int d = 0; d <= 9; ++d) {
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(out(vocab.anchor_id(d), c) == rows(12 + static_cast<std::size_t>(d), c));
            CHECK(out(vocab.offset_id(d), c) ==
                  (rows(12 + static_cast<std::size_t>(d), c) + rows(3, c)) / 2.0);
        }
    }
}

TEST_CASE("prediction head init matches the embedding init row for row") {
    const TemporalVocabulary vocab(24);
    const Matrix rows = random_matrix(24, 8, 4);
    CHECK(bitwise_equal(init_prediction_head(rows, vocab), init_temporal_embeddings(rows, vocab)));
}

TEST_CASE("embedding init accepts extended-size input and overwrites the tail") {
    const TemporalVocabulary vocab(20);
    const Matrix fresh = random_matrix(20, 6, 11);
    const Matrix once = init_temporal_embeddings(fresh, vocab);
    Matrix scribbled = once;
    for (std::size_t r = 20; r < 40; ++r) {
        for (std::size_t c = 0; c < 6; ++c) scribbled(r, c) = -1234.5;
    }
    const Matrix again = init_temporal_embeddings(scribbled, vocab);
    CHECK(bitwise_equal(again, once));
}

TEST_CASE("embedding init shape errors") {
    const TemporalVocabulary vocab(40);
    CHECK_THROWS_AS(init_temporal_embeddings(random_matrix(12, 4, 1), vocab), ShapeError);
    CHECK_THROWS_AS(init_temporal_embeddings(random_matrix(41, 4, 1), vocab), ShapeError);
    CHECK_THROWS_AS(init_temporal_embeddings(Matrix(40, 0), vocab), ShapeError);
}
