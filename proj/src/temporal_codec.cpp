// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/temporal_codec.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

#include "timegrain/errors.hpp"

namespace timegrain {

namespace {

// Whole seconds this many decimal digits long still fit the tenths counter
// after the *10 step.
constexpr std::size_t max_integer_digits = 18;

} // namespace

TimestampTenths quantize(double seconds) {
    if (!std::isfinite(seconds)) throw ArgumentError("timestamp is not finite");
    if (seconds < 0.0) throw ArgumentError("timestamp is negative");
    if (seconds == 0.0) return 0; // covers -0.0

    // Shortest decimal string that round-trips, in plain positional notation.
    char buf[1024];
    const auto res = std::to_chars(buf, buf + sizeof(buf), seconds, std::chars_format::fixed);
    if (res.ec != std::errc()) throw ArgumentError("timestamp cannot be rendered");
    const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));

    const std::size_t point = text.find('.');
    const std::string_view int_part = point == std::string_view::npos ? text : text.substr(0, point);
    const std::string_view frac_part = point == std::string_view::npos ? std::string_view{} : text.substr(point + 1);

    if (int_part.size() > max_integer_digits) throw ArgumentError("timestamp too large");

    TimestampTenths tenths = 0;
    for (char c : int_part) tenths = tenths * 10 + static_cast<TimestampTenths>(c - '0');
    tenths *= 10;
    if (!frac_part.empty()) {
        tenths += static_cast<TimestampTenths>(frac_part[0] - '0');
        // Decimal round-half-up on what remains; ties away from zero for a
        // non-negative value.
        if (frac_part.size() > 1 && frac_part[1] >= '5') ++tenths;
    }
    return tenths;
}

double tenths_to_seconds(TimestampTenths t) {
    return static_cast<double>(t) / 10.0;
}

std::string render_tenths(TimestampTenths t) {
    std::string s = std::to_string(t / 10);
    s += '.';
    s += static_cast<char>('0' + t % 10);
    return s;
}

std::string token_text(const TemporalToken& tok) {
    if (tok.digit < 0 || tok.digit > 9) throw ArgumentError("token digit out of range");
    std::string s = "<a0>";
    s[1] = tok.kind == TemporalToken::Kind::anchor ? 'a' : 'f';
    s[2] = static_cast<char>('0' + tok.digit);
    return s;
}

TemporalToken parse_token(std::string_view text) {
    if (text.size() != 4 || text[0] != '<' || text[3] != '>' || text[2] < '0' || text[2] > '9' ||
        (text[1] != 'a' && text[1] != 'f')) {
        throw ParseError("not a temporal token: " + std::string(text));
    }
    return {text[1] == 'a' ? TemporalToken::Kind::anchor : TemporalToken::Kind::offset, text[2] - '0'};
}

std::vector<TemporalToken> encode_timestamp(TimestampTenths t) {
    const std::string secs = std::to_string(t / 10);
    std::vector<TemporalToken> out;
    out.reserve(secs.size() + 1);
    for (char c : secs) out.push_back({TemporalToken::Kind::anchor, c - '0'});
    out.push_back({TemporalToken::Kind::offset, static_cast<int>(t % 10)});
    return out;
}

TimestampTenths decode_timestamp(std::span<const TemporalToken> tokens) {
    if (tokens.size() < 2) throw ParseError("timestamp needs at least one anchor and one offset");
    if (tokens.size() - 1 > max_integer_digits) throw ParseError("timestamp token run too long");
    TimestampTenths tenths = 0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].kind != TemporalToken::Kind::anchor) {
            throw ParseError("anchors must precede the offset");
        }
        tenths = tenths * 10 + static_cast<TimestampTenths>(tokens[i].digit);
    }
    const TemporalToken& last = tokens.back();
    if (last.kind != TemporalToken::Kind::offset) throw ParseError("timestamp must end with an offset");
    return tenths * 10 + static_cast<TimestampTenths>(last.digit);
}

std::string encode_timestamp_text(TimestampTenths t) {
    std::string s;
    for (const TemporalToken& tok : encode_timestamp(t)) s += token_text(tok);
    return s;
}

TimestampTenths decode_timestamp_text(std::string_view text) {
    if (text.size() % 4 != 0) throw ParseError("timestamp text length must be a multiple of 4");
    std::vector<TemporalToken> tokens;
    tokens.reserve(text.size() / 4);
    for (std::size_t i = 0; i < text.size(); i += 4) tokens.push_back(parse_token(text.substr(i, 4)));
    return decode_timestamp(tokens);
}

TemporalVocabulary::TemporalVocabulary(std::size_t base_size) : base_size_(base_size) {
    if (base_size < 11) throw ConfigError("base vocabulary too small for the numeral convention");
    for (std::size_t i = 0; i < 11; ++i) numeral_ids_[i] = i;
}

TemporalVocabulary::TemporalVocabulary(std::size_t base_size,
                                       const std::array<std::size_t, 11>& numeral_ids)
    : base_size_(base_size), numeral_ids_(numeral_ids) {
    for (std::size_t id : numeral_ids_) {
        if (id >= base_size_) throw ConfigError("numeral id outside the base vocabulary");
    }
}

std::size_t TemporalVocabulary::digit_id(int d) const {
    if (d < 0 || d > 9) throw ArgumentError("digit out of range");
    return numeral_ids_[static_cast<std::size_t>(d)];
}

std::size_t TemporalVocabulary::anchor_id(int d) const {
    if (d < 0 || d > 9) throw ArgumentError("digit out of range");
    return base_size_ + static_cast<std::size_t>(d);
}

std::size_t TemporalVocabulary::offset_id(int d) const {
    if (d < 0 || d > 9) throw ArgumentError("digit out of range");
    return base_size_ + 10 + static_cast<std::size_t>(d);
}

std::size_t TemporalVocabulary::token_id(const TemporalToken& tok) const {
    return tok.kind == TemporalToken::Kind::anchor ? anchor_id(tok.digit) : offset_id(tok.digit);
}

TemporalVocabulary extend_vocabulary(std::size_t base_size) {
    return TemporalVocabulary(base_size);
}

std::vector<std::string> extension_token_texts() {
    std::vector<std::string> out;
    out.reserve(TemporalVocabulary::extension_size);
    for (int d = 0; d <= 9; ++d) out.push_back(token_text({TemporalToken::Kind::anchor, d}));
    for (int d = 0; d <= 9; ++d) out.push_back(token_text({TemporalToken::Kind::offset, d}));
    return out;
}

namespace {

Matrix extend_rows(const Matrix& base_rows, const TemporalVocabulary& vocab) {
    const std::size_t base = vocab.base_size();
    const std::size_t ext = vocab.extended_size();
    if (base_rows.rows() != base && base_rows.rows() != ext) {
        throw ShapeError("table must have base or extended row count");
    }
    if (base_rows.cols() == 0) throw ShapeError("table has no columns");

    Matrix out(ext, base_rows.cols());
    for (std::size_t r = 0; r < base; ++r) {
        for (std::size_t c = 0; c < base_rows.cols(); ++c) out(r, c) = base_rows(r, c);
    }
    for (int d = 0; d <= 9; ++d) {
        const std::size_t digit = vocab.digit_id(d);
        const std::size_t period = vocab.period_id();
        for (std::size_t c = 0; c < base_rows.cols(); ++c) {
            out(vocab.anchor_id(d), c) = base_rows(digit, c);
            out(vocab.offset_id(d), c) = (base_rows(digit, c) + base_rows(period, c)) / 2.0;
        }
    }
    return out;
}

} // namespace

Matrix init_temporal_embeddings(const Matrix& base_rows, const TemporalVocabulary& vocab) {
    return extend_rows(base_rows, vocab);
}

Matrix init_prediction_head(const Matrix& base_rows, const TemporalVocabulary& vocab) {
    return extend_rows(base_rows, vocab);
}

} // namespace timegrain
