// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"

#include "timegrain/errors.hpp"
#include "timegrain/rng.hpp"

namespace timegrain {

AudioClip synthetic_clip(double duration_seconds, std::uint32_t sample_rate, std::uint64_t seed) {
    if (!(duration_seconds > 0.0) || !std::isfinite(duration_seconds)) {
        throw ArgumentError("clip duration must be positive");
    }
    if (sample_rate == 0) throw ArgumentError("sample rate must be positive");
    AudioClip clip;
    clip.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(
        std::llround(duration_seconds * static_cast<double>(sample_rate)));
    clip.samples.resize(std::max<std::size_t>(n, 1));
    std::mt19937_64 rng(seed);
    for (double& s : clip.samples) s = uniform_symmetric(rng);
    return clip;
}

Matrix compress_to_tokens(const Matrix& features, std::size_t n_tokens, std::size_t d,
                          std::uint64_t seed) {
    if (features.empty()) throw ShapeError("cannot compress an empty feature matrix");
    if (n_tokens == 0 || d == 0) throw ArgumentError("token shape must be positive");
    std::mt19937_64 rng(seed);
    Matrix rows(n_tokens, features.rows());
    const double row_scale = 1.0 / std::sqrt(static_cast<double>(features.rows()));
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (std::size_t c = 0; c < rows.cols(); ++c) {
            rows(r, c) = uniform_symmetric(rng) * row_scale;
        }
    }
    Matrix cols(features.cols(), d);
    const double col_scale = 1.0 / std::sqrt(static_cast<double>(features.cols()));
    for (std::size_t r = 0; r < cols.rows(); ++r) {
        for (std::size_t c = 0; c < cols.cols(); ++c) {
            cols(r, c) = uniform_symmetric(rng) * col_scale;
        }
    }
    return matmul(matmul(rows, features), cols);
}

namespace {

struct MergeRun {
    MergeResult result;
    double importance_mass = 0.0;
};

MergeRun merge_tokens(const Matrix& tokens, const AttentionSim& sim, const MergeConfig& mc) {
    MergeRun run;
    run.result = merge_segment(tokens, sim, mc);
    const Matrix q = sim.project_q(tokens);
    const Matrix k = sim.project_k(tokens);
    const auto heads = compute_attention(q, k, sim.d(), sim.heads());
    const auto importance = token_importance(heads);
    double total = 0.0, kept = 0.0;
    for (double v : importance) total += v;
    for (std::size_t i : run.result.attentive_indices) kept += importance[i];
    run.importance_mass = total == 0.0 ? 0.0 : kept / total;
    return run;
}

struct PreparedClip {
    std::vector<Matrix> tokens; // one n_tokens x d matrix per segment
    std::vector<double> starts;
    double duration = 0.0;
    std::size_t sample_rate = 0; // 0 when audio was bypassed
    bool truncated = false;
};

// Shared front half of the demo: window the clip, extract features, add the
// zero-initialized absolute-time rows, resize each window to n_tokens x d.
PreparedClip prepare_clip(const AudioClip& clip, const ToolConfig& cfg, std::size_t n_tokens) {
    cfg.validate();
    if (clip.samples.empty()) throw ArgumentError("clip has no samples");

    AudioClip bounded = clip;
    const auto max_samples = static_cast<std::size_t>(
        std::llround(cfg.max_duration * static_cast<double>(clip.sample_rate)));
    PreparedClip out;
    out.sample_rate = clip.sample_rate;
    if (bounded.samples.size() > max_samples) {
        bounded.samples.resize(std::max<std::size_t>(max_samples, 1));
        out.truncated = true;
    }
    out.duration = bounded.duration_seconds();

    const SegmentationResult seg = segment_clip(bounded, cfg.window_seconds, cfg.max_segments);
    out.truncated = out.truncated || seg.truncated;

    const SyntheticExtractor extractor(cfg.seed);
    const TimeEmbeddingTable table(cfg.positions, extractor.feature_width());
    for (const Segment& s : seg.segments) {
        const Matrix features = extract_features(s, extractor);
        const Matrix encoded = apply_time_encoding(features, table, s.start_time);
        out.tokens.push_back(compress_to_tokens(encoded, n_tokens, cfg.d, cfg.seed));
        out.starts.push_back(s.start_time);
    }
    return out;
}

// Same shape from precomputed features: no windowing or extraction, just the
// time rows and the resize.
PreparedClip prepare_features(const FeatureRecord& record, const ToolConfig& cfg,
                              std::size_t n_tokens) {
    cfg.validate();
    if (record.segments.empty()) throw ArgumentError("feature record has no segments");
    const std::size_t width = record.segments.front().features.cols();
    for (const auto& s : record.segments) {
        if (s.features.empty()) throw ShapeError("feature record segment has no frames");
        if (s.features.cols() != width) {
            throw ShapeError("feature record segments disagree on feature width");
        }
    }

    PreparedClip out;
    out.duration = record.duration;
    std::size_t n = record.segments.size();
    if (n > cfg.max_segments) {
        n = cfg.max_segments;
        out.truncated = true;
    }
    const TimeEmbeddingTable table(cfg.positions, width);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = record.segments[i];
        const Matrix encoded = apply_time_encoding(s.features, table, s.start_time);
        out.tokens.push_back(compress_to_tokens(encoded, n_tokens, cfg.d, cfg.seed));
        out.starts.push_back(s.start_time);
    }
    return out;
}

MergeDemoReport demo_from_prepared(const PreparedClip& prep, const ToolConfig& cfg,
                                   std::size_t n_tokens) {
    if (n_tokens < cfg.n_attentive + cfg.n_contextual) {
        throw ArgumentError("n_tokens must be at least n_attentive + n_contextual");
    }
    const AttentionSim sim(n_tokens, cfg.d, cfg.heads, cfg.seed);
    const MergeConfig mc{cfg.n_attentive, cfg.n_contextual};

    MergeDemoReport report;
    report.n_tokens = n_tokens;
    report.n_attentive = cfg.n_attentive;
    report.n_contextual = cfg.n_contextual;
    report.retained_ratio = static_cast<double>(cfg.n_attentive + cfg.n_contextual) /
                            static_cast<double>(n_tokens);
    report.duration = prep.duration;
    report.sample_rate = prep.sample_rate;
    report.seed = cfg.seed;
    report.truncated = prep.truncated;
    for (std::size_t i = 0; i < prep.tokens.size(); ++i) {
        const MergeRun run = merge_tokens(prep.tokens[i], sim, mc);
        report.segments.push_back({i, prep.starts[i], run.importance_mass, run.result});
    }
    return report;
}

std::vector<SweepRow> sweep_from_prepared(const PreparedClip& prep, const ToolConfig& cfg,
                                          std::size_t n_tokens, std::span<const double> ratios) {
    if (ratios.empty()) throw ArgumentError("ratio sweep needs at least one ratio");
    const AttentionSim sim(n_tokens, cfg.d, cfg.heads, cfg.seed);
    const double contextual_share = static_cast<double>(cfg.n_contextual) /
                                    static_cast<double>(cfg.n_attentive + cfg.n_contextual);

    std::vector<SweepRow> rows;
    for (double ratio : ratios) {
        if (!(ratio > 0.0) || !(ratio <= 1.0)) {
            throw ArgumentError("ratio must be in (0, 1]");
        }
        SweepRow row;
        row.ratio = ratio;
        row.kept = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(n_tokens)));
        if (row.kept == 0 || row.kept > n_tokens) {
            throw ArgumentError("ratio keeps no tokens or more than available");
        }
        row.n_contextual = static_cast<std::size_t>(
            std::llround(contextual_share * static_cast<double>(row.kept)));
        if (row.n_contextual >= row.kept) row.n_contextual = row.kept - 1;
        row.n_attentive = row.kept - row.n_contextual;

        const MergeConfig mc{row.n_attentive, row.n_contextual};
        double mass = 0.0;
        for (const Matrix& tokens : prep.tokens) {
            mass += merge_tokens(tokens, sim, mc).importance_mass;
        }
        row.importance_mass = mass / static_cast<double>(prep.tokens.size());
        rows.push_back(row);
    }
    return rows;
}

} // namespace

MergeDemoReport run_merge_demo(const AudioClip& clip, const ToolConfig& cfg,
                               std::size_t n_tokens) {
    return demo_from_prepared(prepare_clip(clip, cfg, n_tokens), cfg, n_tokens);
}

MergeDemoReport run_merge_demo(const FeatureRecord& record, const ToolConfig& cfg,
                               std::size_t n_tokens) {
    return demo_from_prepared(prepare_features(record, cfg, n_tokens), cfg, n_tokens);
}

std::vector<SweepRow> run_ratio_sweep(const AudioClip& clip, const ToolConfig& cfg,
                                      std::size_t n_tokens, std::span<const double> ratios) {
    return sweep_from_prepared(prepare_clip(clip, cfg, n_tokens), cfg, n_tokens, ratios);
}

std::vector<SweepRow> run_ratio_sweep(const FeatureRecord& record, const ToolConfig& cfg,
                                      std::size_t n_tokens, std::span<const double> ratios) {
    return sweep_from_prepared(prepare_features(record, cfg, n_tokens), cfg, n_tokens, ratios);
}

std::string sweep_table(std::span<const SweepRow> rows) {
    std::string out = "ratio   kept  attentive  contextual  importance_mass\n";
    out += "-----   ----  ---------  ----------  ---------------\n";
    for (const SweepRow& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-5.2f  %5zu  %9zu  %10zu  %15.6f\n", r.ratio, r.kept,
                      r.n_attentive, r.n_contextual, r.importance_mass);
        out += buf;
    }
    return out;
}

std::string MergeDemoReport::to_json() const {
    nlohmann::json j;
    j["n_tokens"] = n_tokens;
    j["n_attentive"] = n_attentive;
    j["n_contextual"] = n_contextual;
    j["retained_ratio"] = retained_ratio;
    j["duration"] = duration;
    j["sample_rate"] = sample_rate;
    j["seed"] = seed;
    j["truncated"] = truncated;
    auto segs = nlohmann::json::array();
    for (const SegmentMergeReport& s : segments) {
        nlohmann::json e;
        e["index"] = s.index;
        e["start"] = s.start_time;
        e["importance_mass"] = s.importance_mass;
        e["merge"] = nlohmann::json::parse(s.merge.to_json());
        segs.push_back(std::move(e));
    }
    j["segments"] = std::move(segs);
    return j.dump(2);
}

} // namespace timegrain
