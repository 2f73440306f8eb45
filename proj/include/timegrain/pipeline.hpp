// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "timegrain/config.hpp"
#include "timegrain/time_encoding.hpp"
#include "timegrain/token_merging.hpp"

namespace timegrain {

// Seeded noise clip in [-1, 1), duration rounded to whole samples.
AudioClip synthetic_clip(double duration_seconds, std::uint32_t sample_rate, std::uint64_t seed);

// Seeded linear resize of a frames x width feature matrix to n_tokens x d.
// Both maps come from one generator, so the result is a pure function of
// (features, n_tokens, d, seed).
Matrix compress_to_tokens(const Matrix& features, std::size_t n_tokens, std::size_t d,
                          std::uint64_t seed);

struct SegmentMergeReport {
    std::size_t index = 0;
    double start_time = 0.0;
    double importance_mass = 0.0; // importance captured by the attentive set
    MergeResult merge;
};

struct MergeDemoReport {
    std::size_t n_tokens = 0;
    std::size_t n_attentive = 0;
    std::size_t n_contextual = 0;
    double retained_ratio = 0.0; // (n_attentive + n_contextual) / n_tokens
    double duration = 0.0;       // seconds actually processed
    std::size_t sample_rate = 0;
    std::uint64_t seed = 0;
    bool truncated = false; // clip exceeded max_duration or the window budget
    std::vector<SegmentMergeReport> segments;

    std::string to_json() const; // pretty, 2-space indent, key-sorted
};

// Full pass over one clip: cut into windows, extract synthetic features,
// add the (zero-initialized) time embedding for each window's start time,
// resize to n_tokens x d, then merge per segment.
// Requires n_tokens >= n_attentive + n_contextual.
MergeDemoReport run_merge_demo(const AudioClip& clip, const ToolConfig& cfg,
                               std::size_t n_tokens);

// Same pass starting from precomputed per-segment features instead of audio.
// Segment starts come from the record; all feature widths must agree.
MergeDemoReport run_merge_demo(const FeatureRecord& record, const ToolConfig& cfg,
                               std::size_t n_tokens);

struct SweepRow {
    double ratio = 0.0;
    std::size_t kept = 0; // round(ratio * n_tokens)
    std::size_t n_attentive = 0;
    std::size_t n_contextual = 0;
    double importance_mass = 0.0; // mean over segments
};

// One merge run per ratio; the attentive/contextual split keeps the
// proportions of cfg. Ratios yielding zero attentive tokens are errors.
std::vector<SweepRow> run_ratio_sweep(const AudioClip& clip, const ToolConfig& cfg,
                                      std::size_t n_tokens, std::span<const double> ratios);

std::vector<SweepRow> run_ratio_sweep(const FeatureRecord& record, const ToolConfig& cfg,
                                      std::size_t n_tokens, std::span<const double> ratios);

std::string sweep_table(std::span<const SweepRow> rows);

inline constexpr double default_sweep_ratios[] = {0.10, 0.15, 0.20, 0.25, 0.30};

} // namespace timegrain
