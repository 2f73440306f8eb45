// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timegrain/temporal_codec.hpp"

namespace timegrain {

enum class Task { dense_caption, grounding, summarization, tqa };

// "dense_caption", "grounding", "summarization", "tqa".
Task task_from_string(std::string_view name);
std::string_view task_to_string(Task task);

enum class TimestampStyle { numeric, marker };

// "numeric", "marker".
TimestampStyle style_from_string(std::string_view name);

struct Interval {
    TimestampTenths start = 0;
    TimestampTenths end = 0;

    bool operator==(const Interval&) const = default;
};

/// One annotated event: where it happens and what it is. Canonical captions
/// carry no trailing period; the formatters add sentence punctuation.
struct EventAnnotation {
    std::vector<Interval> intervals; // sorted by start
    std::string caption;
    std::string label; // optional category; empty means "use the label map"

    bool operator==(const EventAnnotation&) const = default;
};

struct SampleRecord {
    std::string id;
    std::optional<TimestampTenths> duration;
    Task task = Task::dense_caption;
    std::string query; // grounding only
    std::vector<EventAnnotation> events;

    bool operator==(const SampleRecord&) const = default;
};

/// A model's answer after salvage parsing: recovered events plus the raw
/// text and a note for every span the parser had to skip or repair.
struct PredictionRecord {
    std::string id;
    std::optional<TimestampTenths> duration;
    Task task = Task::dense_caption;
    std::string query;
    std::vector<EventAnnotation> events;
    std::string raw_text;
    std::vector<std::string> parse_warnings;
};

// Shared structural checks: non-empty id, per-event intervals sorted with
// start <= end, interval ends within the duration when one is present.
void validate_record(const SampleRecord& rec);

// Numeric: "s - e[, s - e...] seconds, caption" per event; Marker renders
// timestamps as temporal tokens and drops the "seconds" keyword. Events are
// joined by ". " with a closing period; no events yields an empty string.
std::string format_dense_caption(const SampleRecord& rec, TimestampStyle style);

// "The given query happens in s - e[, s - e...] seconds."
std::string format_grounding_answer(const std::vector<Interval>& intervals);

// "s - e, text." per segment, joined by " ". Each event must carry exactly
// one interval and segments must not overlap.
std::string format_summary(const SampleRecord& rec);

// Task dispatch. Marker style rewrites the numeric timestamps of grounding
// and summarization targets via numeric_to_marker; TQA text passes through
// untouched in both styles.
std::string format_target(const SampleRecord& rec, TimestampStyle style);

// "<s><audio>F_audio</audio>" + instruction (plus one space when non-empty)
// + target + "</s>".
std::string build_instruction_record(const SampleRecord& rec, const std::string& instruction,
                                     TimestampStyle style);

inline constexpr std::string_view audio_placeholder = "F_audio";

// Total salvage parser: scans for "number - number" interval runs with
// optional "seconds"/comma suffixes, treats the text between runs as event
// captions, and records every skipped or repaired span in parse_warnings.
// Grounding collects all intervals into one event and silently consumes the
// canonical preamble; TQA text is kept verbatim as a single caption.
PredictionRecord parse_prediction(const std::string& text, Task task);

// Replaces each well-formed temporal-token run with its numeric timestamp.
// Malformed runs (dangling offsets and the like) throw ParseError naming the
// byte position.
std::string marker_to_numeric(const std::string& text);

struct MarkerScrub {
    std::string text;
    std::vector<std::string> warnings;
};

// Like marker_to_numeric, but leaves malformed runs verbatim and reports
// them as warnings; parse_prediction uses this pass.
MarkerScrub marker_to_numeric_tolerant(const std::string& text);

// Replaces each standalone decimal number (digits '.' digits) with its
// temporal-token form. Integers without a decimal point are left alone so
// ordinary prose ("10th") survives. Inverse of marker_to_numeric on
// canonical one-decimal text.
std::string numeric_to_marker(const std::string& text);

// JSONL: {"id", "duration"?, "task", "query"?, "events": [{"intervals":
// [[s,e],...], "caption", "label"?}]}; predictions add "raw_text" and
// "parse_warnings". Timestamps are quantized to tenths on read.
SampleRecord sample_record_from_json(const std::string& line);
std::string sample_record_to_json(const SampleRecord& rec);
PredictionRecord prediction_record_from_json(const std::string& line);
std::string prediction_record_to_json(const PredictionRecord& rec);

} // namespace timegrain
