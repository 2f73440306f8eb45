// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "timegrain/task_grammar.hpp"

namespace timegrain {

/// Normalized set of time intervals: sorted, with overlapping or touching
/// spans merged on construction. All lengths are exact tenths, so IoU values
/// are ratios of integers and reproduce bit-for-bit everywhere.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals);

    const std::vector<Interval>& intervals() const { return intervals_; }
    TimestampTenths total_tenths() const { return total_; }
    bool empty() const { return intervals_.empty(); }

private:
    std::vector<Interval> intervals_;
    TimestampTenths total_ = 0;
};

// |a n b| / |a u b|; 0/0 is defined as 0 so an empty prediction scores zero
// against a non-empty reference.
double iou(const IntervalSet& a, const IntervalSet& b);

double miou(std::span<const std::pair<IntervalSet, IntervalSet>> pairs);

// Fraction of pairs with iou >= tau, one entry per threshold, in input order.
std::vector<std::pair<double, double>>
recall_at(std::span<const std::pair<IntervalSet, IntervalSet>> pairs,
          std::span<const double> thresholds);

/// Ordered caption-pattern -> category table. Lookup lowercases the caption
/// and returns the category of the first pattern found as a substring;
/// anything unmatched maps to "other".
class LabelMap {
public:
    LabelMap() = default;

    // Lines of "pattern => category"; '#' comments and blank lines ignored.
    static LabelMap load(const std::string& path);
    static LabelMap from_pairs(std::vector<std::pair<std::string, std::string>> pairs);

    std::string category_for(const std::string& caption) const;

    // Event label when present, otherwise the caption's category.
    std::string effective_label(const EventAnnotation& ev) const;

private:
    std::vector<std::pair<std::string, std::string>> patterns_; // lowercased pattern, category
};

struct MatchConfig {
    double onset_collar = 0.2;              // seconds
    double offset_tolerance_fraction = 0.2; // of the reference event length
};

struct F1Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Event-based scores: every interval of every annotation is one event with
// its effective label. A prediction matches a reference iff the labels are
// equal, onsets differ by at most onset_collar, and offsets by at most
// max(onset_collar, offset_tolerance_fraction * reference event length).
// Matching is one-to-one and greedy in onset order; precision/recall/F1 are
// micro-averaged over all samples, pairing records by id.
F1Scores event_based_f1(std::span<const SampleRecord> preds, std::span<const SampleRecord> refs,
                        const MatchConfig& cfg, const LabelMap& labels);

// Clip-level tagging score: per sample, the sets of event categories present
// in prediction and reference; per category an F1 over all samples; macro
// average over every category seen anywhere. No categories at all gives 1.
double clip_macro_f1(std::span<const SampleRecord> preds, std::span<const SampleRecord> refs,
                     const LabelMap& labels);

// Lowercase, delete punctuation, split on whitespace. ASCII-oriented.
std::vector<std::string> tokenize_text(const std::string& text);

// Unigram-overlap F1 with clipped counts / LCS-based F1, both with equal
// precision and recall weighting. Empty texts score 0.
double rouge1(const std::string& candidate, const std::string& reference);
double rougeL(const std::string& candidate, const std::string& reference);

struct EvalOptions {
    MatchConfig match;
    LabelMap labels;
};

struct EvalReport {
    Task task = Task::dense_caption;
    std::size_t n_samples = 0;
    std::map<std::string, double> metrics;
    // Sorted by sample id; values depend on the task.
    std::vector<std::pair<std::string, std::map<std::string, double>>> per_sample;
    std::vector<std::string> notes;
    std::vector<std::string> missing_prediction_ids;

    std::string to_json() const; // pretty, 2-space indent, key-sorted
    std::string to_table() const;
};

// Scores a predictions file against a references file (task_grammar JSONL).
// Reference ids must be unique; every prediction id must refer to a
// reference; references without predictions are scored as empty predictions
// and listed in the report.
//   dense_caption  -> eb_precision, eb_recall, eb_f1, at_f1
//   grounding      -> miou, r@0.5, r@0.7, r@0.9 (per query, union of spans)
//   summarization  -> rouge1, rougeL, timeline_miou
EvalReport evaluate_task(const std::string& preds_path, const std::string& refs_path, Task task,
                         const EvalOptions& options);

} // namespace timegrain
