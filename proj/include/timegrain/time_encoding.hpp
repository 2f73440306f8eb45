// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "timegrain/matrix.hpp"

namespace timegrain {

struct AudioClip {
    std::uint32_t sample_rate = 16000;
    std::vector<double> samples; // mono, nominally in [-1, 1]

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
    }
};

// 16-bit PCM mono only; the clip keeps the header's sample rate.
AudioClip read_wav(const std::string& path);
void write_wav(const AudioClip& clip, const std::string& path);

/// One window of a clip. Fresh from segment_clip it carries raw samples;
/// extract_features fills `features` (frames x d_feat). Feature-file records
/// carry features only.
struct Segment {
    std::size_t index = 0;
    double start_time = 0.0; // seconds; index * window_seconds for clip windows
    std::uint32_t sample_rate = 16000;
    std::vector<double> samples;
    Matrix features;
};

struct SegmentationResult {
    std::vector<Segment> segments;
    // Audio past max_segments windows was dropped. Kept explicit because a
    // silent cut would skew any downstream timing evaluation.
    bool truncated = false;
};

// Consecutive non-overlapping windows; the final partial window is kept.
// Empty clips yield an empty result.
SegmentationResult segment_clip(const AudioClip& clip, double window_seconds = 30.0,
                                std::size_t max_segments = 5);

/// Produces two frame-aligned feature streams for a raw segment, standing in
/// for a (speech, acoustic) encoder pair. Both streams must have the same
/// frame count.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual std::pair<Matrix, Matrix> extract(const Segment& seg) const = 0;
};

/// Deterministic extractor so the pipeline runs with no model weights:
/// per 0.1 s window it computes six zero-preserving sample statistics and
/// maps them through fixed seeded linear projections to streams of widths
/// d1 and d2. Zero samples therefore give a zero feature matrix.
class SyntheticExtractor : public FeatureExtractor {
public:
    explicit SyntheticExtractor(std::uint64_t seed = 0, std::size_t d1 = 8, std::size_t d2 = 4);

    std::pair<Matrix, Matrix> extract(const Segment& seg) const override;

    std::size_t feature_width() const { return d1_ + d2_; }

private:
    std::size_t d1_;
    std::size_t d2_;
    Matrix map1_; // stats -> stream 1
    Matrix map2_; // stats -> stream 2
};

// Frame-wise concatenation of the extractor's two streams; mismatched frame
// counts violate the extractor contract.
Matrix extract_features(const Segment& seg, const FeatureExtractor& extractor);

/// Absolute-time embedding table: one row per discretized second, added to
/// every frame of a segment starting at that time. Zero-initialized so that
/// applying a fresh table changes nothing.
class TimeEmbeddingTable {
public:
    TimeEmbeddingTable(std::size_t positions, std::size_t width);

    static TimeEmbeddingTable from_matrix(Matrix table);

    std::size_t positions() const { return table_.rows(); }
    std::size_t width() const { return table_.cols(); }

    const Matrix& table() const { return table_; }
    Matrix& table() { return table_; }

private:
    explicit TimeEmbeddingTable(Matrix table) : table_(std::move(table)) {}

    Matrix table_;
};

// Discretized table row for time t: round(t) at 1-second resolution, clamped
// to positions - 1. Monotone non-decreasing in t.
std::size_t time_index(double t_seconds, std::size_t positions);

// w + broadcast of the table row for t to every frame. Zero offsets are
// skipped element-wise, so a zero table is the bit-exact identity (signed
// zeros included); frame-to-frame differences are never altered.
Matrix apply_time_encoding(const Matrix& w, const TimeEmbeddingTable& table, double t_seconds);

/// Segment features for one clip, bypassing audio entirely.
/// JSONL form: {"id", "duration", "segments": [{"start", "features": {...}}]}.
struct FeatureRecord {
    std::string id;
    double duration = 0.0;
    std::vector<Segment> segments; // samples empty, features set
};

FeatureRecord feature_record_from_json(const std::string& line);
std::string feature_record_to_json(const FeatureRecord& rec);

} // namespace timegrain
