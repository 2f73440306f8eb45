// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timegrain/matrix.hpp"

namespace timegrain {

/// Timestamps are stored as an integer count of tenths of a second. All
/// formatting, parsing and metric code works on this type; doubles only
/// appear at the API edges.
using TimestampTenths = std::uint64_t;

// Nearest tenth of the decimal value `seconds` denotes, ties away from zero.
// The binary double is first converted to its shortest round-trip decimal
// string, then rounded in decimal, so quantize(2.55) == 26 even though
// 2.55 < 2.55 in binary. Negative or non-finite input throws ArgumentError,
// as do values too large for the tenths counter.
TimestampTenths quantize(double seconds);

double tenths_to_seconds(TimestampTenths t);

// "2.6", "10.0", "0.3": always exactly one fractional digit.
std::string render_tenths(TimestampTenths t);

/// One temporal vocabulary token: an anchor digit <aD> (integer seconds) or
/// an offset digit <fD> (tenths).
struct TemporalToken {
    enum class Kind { anchor, offset };

    Kind kind = Kind::anchor;
    int digit = 0; // 0..9

    bool operator==(const TemporalToken&) const = default;
};

std::string token_text(const TemporalToken& tok);

// Inverse of token_text; anything else throws ParseError.
TemporalToken parse_token(std::string_view text);

// Anchor digits of the whole seconds, most significant first, then exactly
// one offset digit: 26 tenths -> <a2><f6>, 1234 tenths -> <a1><a2><a3><f4>.
std::vector<TemporalToken> encode_timestamp(TimestampTenths t);

// Accepts one or more anchors followed by exactly one offset. Leading zero
// anchors are read as their numeric value; any other shape throws ParseError.
TimestampTenths decode_timestamp(std::span<const TemporalToken> tokens);

std::string encode_timestamp_text(TimestampTenths t);
TimestampTenths decode_timestamp_text(std::string_view text);

/// Layout of the 20 temporal tokens appended to a base vocabulary, plus the
/// base ids of the numerals their embeddings are derived from.
///
/// Extended ids are fixed: anchors occupy base_size+0..9, offsets
/// base_size+10..19.
class TemporalVocabulary {
public:
    static constexpr std::size_t extension_size = 20;

    // Conventional numeral layout: digit d has base id d and "." has id 10.
    // base_size must cover those ids.
    explicit TemporalVocabulary(std::size_t base_size);

    // numeral_ids[0..9] are the base ids of digits "0".."9";
    // numeral_ids[10] is the base id of ".". All must be < base_size.
    TemporalVocabulary(std::size_t base_size, const std::array<std::size_t, 11>& numeral_ids);

    std::size_t base_size() const { return base_size_; }
    std::size_t extended_size() const { return base_size_ + extension_size; }

    std::size_t digit_id(int d) const;
    std::size_t period_id() const { return numeral_ids_[10]; }

    std::size_t anchor_id(int d) const;
    std::size_t offset_id(int d) const;
    std::size_t token_id(const TemporalToken& tok) const;

private:
    std::size_t base_size_ = 0;
    std::array<std::size_t, 11> numeral_ids_{};
};

// Vocabulary appending the 20 temporal tokens after a base vocabulary of
// base_size ids, under the conventional numeral layout.
TemporalVocabulary extend_vocabulary(std::size_t base_size);

// Token strings for the appended ids, in extended-id order:
// <a0>..<a9>, <f0>..<f9>.
std::vector<std::string> extension_token_texts();

// Embedding rows for the extended vocabulary. Anchor rows copy the matching
// digit row; offset rows are the mean of the digit row and the "." row.
// `base_rows` may have base_size rows (20 rows are appended) or extended_size
// rows (the tail 20 are overwritten); any other count throws ShapeError.
Matrix init_temporal_embeddings(const Matrix& base_rows, const TemporalVocabulary& vocab);

// Same derivation applied to an output-projection table; kept separate so
// call sites say which table they are extending.
Matrix init_prediction_head(const Matrix& base_rows, const TemporalVocabulary& vocab);

} // namespace timegrain
