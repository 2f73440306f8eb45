// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/task_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "json.hpp"

#include "timegrain/errors.hpp"

namespace timegrain {

namespace {

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::size_t skip_ws(const std::string& s, std::size_t i) {
    while (i < s.size() && is_space(s[i])) ++i;
    return i;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// A number may start here only when it is not glued to a word or another
// number ("10th" yes at '1'; the '5' of "3.5" no).
bool boundary_before(const std::string& s, std::size_t i) {
    if (i == 0) return true;
    const char p = s[i - 1];
    return !(is_alnum(p) || p == '.');
}

struct NumberTok {
    double value = 0.0;
    std::size_t end = 0;
};

std::optional<NumberTok> match_number(const std::string& s, std::size_t i) {
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j == i) return std::nullopt;
    if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
    }
    NumberTok tok;
    tok.end = j;
    const auto res = std::from_chars(s.data() + i, s.data() + j, tok.value);
    if (res.ec != std::errc() || res.ptr != s.data() + j) return std::nullopt; // overflow etc.
    return tok;
}

struct IntervalTok {
    double a = 0.0;
    double b = 0.0;
    std::size_t end = 0;
};

std::optional<IntervalTok> match_interval(const std::string& s, std::size_t i) {
    const auto n1 = match_number(s, i);
    if (!n1) return std::nullopt;
    std::size_t j = skip_ws(s, n1->end);
    if (j >= s.size() || s[j] != '-') return std::nullopt;
    j = skip_ws(s, j + 1);
    const auto n2 = match_number(s, j);
    if (!n2) return std::nullopt;
    if (n2->end < s.size() && is_alnum(s[n2->end])) return std::nullopt; // "1 - 2nd"
    return IntervalTok{n1->value, n2->value, n2->end};
}

struct RunTok {
    std::vector<std::pair<double, double>> intervals;
    std::size_t end = 0;
};

// One interval run: comma-joined intervals, then an optional "seconds"
// keyword and one separating comma.
std::optional<RunTok> match_run(const std::string& s, std::size_t i) {
    auto iv = match_interval(s, i);
    if (!iv) return std::nullopt;
    RunTok run;
    run.intervals.emplace_back(iv->a, iv->b);
    run.end = iv->end;
    while (true) {
        std::size_t j = skip_ws(s, run.end);
        if (j < s.size() && s[j] == ',') {
            j = skip_ws(s, j + 1);
            if (const auto next = match_interval(s, j)) {
                run.intervals.emplace_back(next->a, next->b);
                run.end = next->end;
                continue;
            }
        }
        break;
    }
    std::size_t j = skip_ws(s, run.end);
    if (s.compare(j, 7, "seconds") == 0 && (j + 7 == s.size() || !is_alnum(s[j + 7]))) {
        run.end = j + 7;
        j = skip_ws(s, run.end);
    }
    if (j < s.size() && s[j] == ',') run.end = j + 1;
    return run;
}

struct RunAt {
    std::size_t start = 0;
    RunTok run;
};

std::optional<RunAt> find_run(const std::string& s, std::size_t from) {
    for (std::size_t j = from; j < s.size(); ++j) {
        if (!is_digit(s[j]) || !boundary_before(s, j)) continue;
        if (auto run = match_run(s, j)) return RunAt{j, std::move(*run)};
    }
    return std::nullopt;
}

std::string quote_text(std::string_view s) {
    std::string out = "\"";
    out += s;
    out += '"';
    return out;
}

// Trim, then drop the single sentence period the formatters append.
std::string clean_caption(std::string_view raw) {
    std::string s = trim(raw);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string render_interval(const Interval& iv) {
    return render_tenths(iv.start) + " - " + render_tenths(iv.end);
}

std::string render_interval_marker(const Interval& iv) {
    return encode_timestamp_text(iv.start) + " - " + encode_timestamp_text(iv.end);
}

void validate_intervals(const EventAnnotation& ev, const std::string& id) {
    for (std::size_t i = 0; i < ev.intervals.size(); ++i) {
        if (ev.intervals[i].start > ev.intervals[i].end) {
            throw ValidationError("record " + quote_text(id) + ": interval start after end");
        }
        if (i > 0 && ev.intervals[i].start < ev.intervals[i - 1].start) {
            throw ValidationError("record " + quote_text(id) + ": unsorted intervals");
        }
    }
}

constexpr std::string_view grounding_preamble = "The given query happens in";

// Exact temporal token at position i, or nothing.
std::optional<TemporalToken> token_at(const std::string& s, std::size_t i) {
    if (i + 4 > s.size() || s[i] != '<' || s[i + 3] != '>') return std::nullopt;
    if ((s[i + 1] != 'a' && s[i + 1] != 'f') || !is_digit(s[i + 2])) return std::nullopt;
    return TemporalToken{s[i + 1] == 'a' ? TemporalToken::Kind::anchor : TemporalToken::Kind::offset,
                         s[i + 2] - '0'};
}

MarkerScrub scrub_markers(const std::string& text, bool strict) {
    MarkerScrub out;
    out.text.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (!token_at(text, i)) {
            out.text += text[i];
            ++i;
            continue;
        }
        const std::size_t run_start = i;
        std::vector<TemporalToken> run;
        while (const auto tok = token_at(text, i)) {
            run.push_back(*tok);
            i += 4;
        }
        try {
            out.text += render_tenths(decode_timestamp(run));
        } catch (const ParseError& e) {
            if (strict) {
                throw ParseError("temporal token run at byte " + std::to_string(run_start) + ": " +
                                 e.what());
            }
            out.warnings.push_back("malformed temporal token run at byte " +
                                   std::to_string(run_start) + ": " +
                                   quote_text(text.substr(run_start, i - run_start)));
            out.text += text.substr(run_start, i - run_start);
        }
    }
    return out;
}

} // namespace

Task task_from_string(std::string_view name) {
    if (name == "dense_caption") return Task::dense_caption;
    if (name == "grounding") return Task::grounding;
    if (name == "summarization") return Task::summarization;
    if (name == "tqa") return Task::tqa;
    throw ParseError("unknown task: " + std::string(name));
}

std::string_view task_to_string(Task task) {
    switch (task) {
    case Task::dense_caption: return "dense_caption";
    case Task::grounding: return "grounding";
    case Task::summarization: return "summarization";
    case Task::tqa: return "tqa";
    }
    throw ArgumentError("invalid task value");
}

TimestampStyle style_from_string(std::string_view name) {
    if (name == "numeric") return TimestampStyle::numeric;
    if (name == "marker") return TimestampStyle::marker;
    throw ParseError("unknown timestamp style: " + std::string(name));
}

void validate_record(const SampleRecord& rec) {
    if (rec.id.empty()) throw ValidationError("record id is empty");
    for (const EventAnnotation& ev : rec.events) {
        validate_intervals(ev, rec.id);
        if (rec.duration) {
            for (const Interval& iv : ev.intervals) {
                // One tenth of slack: both ends were quantized independently.
                if (iv.end > *rec.duration + 1) {
                    throw ValidationError("record " + quote_text(rec.id) +
                                          ": interval ends after clip duration");
                }
            }
        }
    }
}

std::string format_dense_caption(const SampleRecord& rec, TimestampStyle style) {
    if (rec.task != Task::dense_caption) throw ArgumentError("record task is not dense_caption");
    validate_record(rec);

    std::string out;
    for (std::size_t e = 0; e < rec.events.size(); ++e) {
        const EventAnnotation& ev = rec.events[e];
        if (ev.intervals.empty()) {
            throw ValidationError("record " + quote_text(rec.id) + ": dense event without intervals");
        }
        if (e > 0) out += ". ";
        for (std::size_t i = 0; i < ev.intervals.size(); ++i) {
            if (i > 0) out += ", ";
            out += style == TimestampStyle::numeric ? render_interval(ev.intervals[i])
                                                    : render_interval_marker(ev.intervals[i]);
        }
        if (style == TimestampStyle::numeric) out += " seconds";
        out += ", ";
        out += ev.caption;
    }
    if (!rec.events.empty()) out += '.';
    return out;
}

std::string format_grounding_answer(const std::vector<Interval>& intervals) {
    if (intervals.empty()) throw ValidationError("grounding answer needs at least one interval");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].start > intervals[i].end) {
            throw ValidationError("grounding interval start after end");
        }
        if (i > 0 && intervals[i].start < intervals[i - 1].start) {
            throw ValidationError("grounding intervals unsorted");
        }
    }
    std::string out = std::string(grounding_preamble) + " ";
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_interval(intervals[i]);
    }
    out += " seconds.";
    return out;
}

std::string format_summary(const SampleRecord& rec) {
    if (rec.task != Task::summarization) throw ArgumentError("record task is not summarization");
    validate_record(rec);

    std::string out;
    TimestampTenths prev_end = 0;
    for (std::size_t e = 0; e < rec.events.size(); ++e) {
        const EventAnnotation& ev = rec.events[e];
        if (ev.intervals.size() != 1) {
            throw ValidationError("record " + quote_text(rec.id) +
                                  ": summary events carry exactly one interval");
        }
        if (e > 0) {
            if (ev.intervals[0].start < prev_end) {
                throw ValidationError("record " + quote_text(rec.id) + ": overlapping summary segments");
            }
            out += ' ';
        }
        prev_end = ev.intervals[0].end;
        out += render_interval(ev.intervals[0]);
        out += ", ";
        out += ev.caption;
        out += '.';
    }
    return out;
}

namespace {

std::string format_tqa(const SampleRecord& rec) {
    std::string out;
    for (std::size_t e = 0; e < rec.events.size(); ++e) {
        if (e > 0) out += ' ';
        out += rec.events[e].caption;
    }
    return out;
}

std::vector<Interval> all_intervals(const SampleRecord& rec) {
    std::vector<Interval> out;
    for (const EventAnnotation& ev : rec.events) {
        out.insert(out.end(), ev.intervals.begin(), ev.intervals.end());
    }
    return out;
}

} // namespace

std::string format_target(const SampleRecord& rec, TimestampStyle style) {
    switch (rec.task) {
    case Task::dense_caption:
        return format_dense_caption(rec, style);
    case Task::grounding: {
        validate_record(rec);
        const std::string numeric = format_grounding_answer(all_intervals(rec));
        return style == TimestampStyle::numeric ? numeric : numeric_to_marker(numeric);
    }
    case Task::summarization: {
        const std::string numeric = format_summary(rec);
        return style == TimestampStyle::numeric ? numeric : numeric_to_marker(numeric);
    }
    case Task::tqa:
        validate_record(rec);
        return format_tqa(rec); // free text passes through in both styles
    }
    throw ArgumentError("invalid task value");
}

std::string build_instruction_record(const SampleRecord& rec, const std::string& instruction,
                                     TimestampStyle style) {
    std::string out = "<s><audio>";
    out += audio_placeholder;
    out += "</audio>";
    if (!instruction.empty()) {
        out += instruction;
        out += ' ';
    }
    out += format_target(rec, style);
    out += "</s>";
    return out;
}

namespace {

struct RawEvent {
    std::vector<std::pair<double, double>> intervals;
    std::string caption;
};

// Caption text runs until the next full interval run. A number followed by a
// dash that fails to complete an interval truncates the caption instead; the
// skipped span is reported, never silently eaten.
struct CaptionScan {
    std::size_t caption_end = 0;
    std::optional<std::size_t> fragment_start;
    std::optional<RunAt> next_run;
};

CaptionScan scan_caption(const std::string& s, std::size_t from) {
    CaptionScan out;
    out.caption_end = s.size();
    for (std::size_t j = from; j < s.size(); ++j) {
        if (!is_digit(s[j]) || !boundary_before(s, j)) continue;
        if (auto run = match_run(s, j)) {
            out.caption_end = j;
            out.next_run = RunAt{j, std::move(*run)};
            return out;
        }
        const auto num = match_number(s, j);
        if (!num) continue; // unrepresentable digit blob; treat as prose
        const std::size_t k = skip_ws(s, num->end);
        if (k < s.size() && s[k] == '-') {
            out.caption_end = j;
            out.fragment_start = j;
            return out;
        }
        j = num->end - 1; // plain number in prose; step past it
    }
    return out;
}

std::vector<RawEvent> scan_events(const std::string& text, std::vector<std::string>& warnings) {
    std::vector<RawEvent> events;
    auto first = find_run(text, 0);
    if (!first) {
        warnings.push_back(trim(text).empty() ? "empty text"
                                              : "no interval runs found in " + quote_text(trim(text)));
        return events;
    }
    if (const std::string lead = trim(text.substr(0, first->start)); !lead.empty()) {
        warnings.push_back("ignored text before first interval run: " + quote_text(lead));
    }

    RunAt current = std::move(*first);
    while (true) {
        CaptionScan scan = scan_caption(text, current.run.end);
        std::string caption =
            clean_caption(text.substr(current.run.end, scan.caption_end - current.run.end));

        if (scan.fragment_start) {
            // Drop everything from the dangling fragment to the next run.
            auto next = find_run(text, *scan.fragment_start + 1);
            const std::size_t drop_end = next ? next->start : text.size();
            warnings.push_back(
                "unparsed span dropped: " +
                quote_text(trim(text.substr(*scan.fragment_start, drop_end - *scan.fragment_start))));
            scan.next_run = std::move(next);
        }

        events.push_back({std::move(current.run.intervals), std::move(caption)});
        if (!scan.next_run) break;
        current = std::move(*scan.next_run);
    }
    return events;
}

// Quantize raw interval pairs, repairing reversed pairs and unsorted lists
// with a warning each.
std::vector<Interval> quantize_intervals(const std::vector<std::pair<double, double>>& raw,
                                         std::vector<std::string>& warnings) {
    std::vector<Interval> out;
    for (const auto& [a, b] : raw) {
        TimestampTenths qa = 0, qb = 0;
        try {
            qa = quantize(a);
            qb = quantize(b);
        } catch (const ArgumentError&) {
            warnings.push_back("interval out of range dropped");
            continue;
        }
        if (qa > qb) {
            warnings.push_back("reversed interval " + render_tenths(qa) + " - " + render_tenths(qb) +
                               " swapped");
            std::swap(qa, qb);
        }
        out.push_back({qa, qb});
    }
    const bool sorted = std::is_sorted(out.begin(), out.end(), [](const Interval& x, const Interval& y) {
        return x.start < y.start || (x.start == y.start && x.end < y.end);
    });
    if (!sorted) {
        warnings.push_back("intervals reordered by start time");
        std::stable_sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) {
            return x.start < y.start || (x.start == y.start && x.end < y.end);
        });
    }
    return out;
}

} // namespace

PredictionRecord parse_prediction(const std::string& text, Task task) {
    PredictionRecord rec;
    rec.task = task;
    rec.raw_text = text;

    if (task == Task::tqa) {
        if (!text.empty()) rec.events.push_back({{}, text, ""});
        return rec;
    }

    MarkerScrub scrub;
    if (text.find('<') != std::string::npos) {
        scrub = scrub_markers(text, /*strict=*/false);
    } else {
        scrub.text = text;
    }
    rec.parse_warnings = std::move(scrub.warnings);

    std::string body = std::move(scrub.text);
    if (task == Task::grounding) {
        const std::size_t at = skip_ws(body, 0);
        if (body.compare(at, grounding_preamble.size(), grounding_preamble) == 0) {
            body.erase(0, at + grounding_preamble.size());
        }
    }

    const auto raw_events = scan_events(body, rec.parse_warnings);

    if (task == Task::grounding) {
        std::vector<std::pair<double, double>> merged;
        for (const RawEvent& ev : raw_events) {
            merged.insert(merged.end(), ev.intervals.begin(), ev.intervals.end());
            // The canonical answer's closing "." lands in front of any junk
            // that follows it; only the junk itself is worth a warning.
            std::string junk = ev.caption;
            junk.erase(0, std::min(junk.find_first_not_of(".,;: \t"), junk.size()));
            if (!junk.empty()) {
                rec.parse_warnings.push_back("unexpected text in grounding answer: " +
                                             quote_text(junk));
            }
        }
        auto intervals = quantize_intervals(merged, rec.parse_warnings);
        if (!intervals.empty()) rec.events.push_back({std::move(intervals), "", ""});
        return rec;
    }

    for (const RawEvent& ev : raw_events) {
        auto intervals = quantize_intervals(ev.intervals, rec.parse_warnings);
        if (intervals.empty()) continue; // warning already recorded
        rec.events.push_back({std::move(intervals), ev.caption, ""});
    }
    return rec;
}

std::string marker_to_numeric(const std::string& text) {
    return scrub_markers(text, /*strict=*/true).text;
}

MarkerScrub marker_to_numeric_tolerant(const std::string& text) {
    return scrub_markers(text, /*strict=*/false);
}

std::string numeric_to_marker(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_digit(text[i]) || !boundary_before(text, i)) {
            out += text[i];
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_digit(text[j])) ++j;
        const std::size_t int_end = j;
        bool decimal = false;
        if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
            decimal = true;
            ++j;
            while (j < text.size() && is_digit(text[j])) ++j;
        }
        // Only standalone decimal numbers are timestamps; bare integers and
        // glued suffixes ("10th", "1.2.3") are prose.
        const bool standalone = j == text.size() || (!is_alnum(text[j]) && text[j] != '.');
        if (!decimal || !standalone) {
            out += text.substr(i, (decimal ? j : int_end) - i);
            i = decimal ? j : int_end;
            continue;
        }
        double v = 0.0;
        const auto res = std::from_chars(text.data() + i, text.data() + j, v);
        if (res.ec == std::errc()) {
            try {
                out += encode_timestamp_text(quantize(v));
                i = j;
                continue;
            } catch (const ArgumentError&) {
                // too large for the tenths counter; treat as prose
            }
        }
        out += text.substr(i, j - i);
        i = j;
    }
    return out;
}

namespace {

TimestampTenths quantize_field(const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw ParseError(std::string(what) + " must be a number");
    const double d = v.get<double>();
    try {
        return quantize(d);
    } catch (const ArgumentError& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

void read_common(const nlohmann::json& j, std::string& id, std::optional<TimestampTenths>& duration,
                 Task& task, std::string& query, std::vector<EventAnnotation>& events) {
    if (!j.is_object()) throw ParseError("record must be a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError("record needs a string id");
    if (!j.contains("task") || !j["task"].is_string()) throw ParseError("record needs a task");
    if (!j.contains("events") || !j["events"].is_array()) {
        throw ParseError("record needs an events array");
    }
    id = j["id"].get<std::string>();
    task = task_from_string(j["task"].get<std::string>());
    if (j.contains("duration")) duration = quantize_field(j["duration"], "duration");
    if (j.contains("query")) {
        if (!j["query"].is_string()) throw ParseError("query must be a string");
        query = j["query"].get<std::string>();
    }
    for (const auto& ej : j["events"]) {
        if (!ej.is_object() || !ej.contains("intervals") || !ej["intervals"].is_array()) {
            throw ParseError("event needs an intervals array");
        }
        EventAnnotation ev;
        for (const auto& ij : ej["intervals"]) {
            if (!ij.is_array() || ij.size() != 2) {
                throw ParseError("interval must be a [start, end] pair");
            }
            Interval iv;
            iv.start = quantize_field(ij[0], "interval start");
            iv.end = quantize_field(ij[1], "interval end");
            ev.intervals.push_back(iv);
        }
        if (ej.contains("caption")) {
            if (!ej["caption"].is_string()) throw ParseError("caption must be a string");
            ev.caption = ej["caption"].get<std::string>();
        }
        if (ej.contains("label")) {
            if (!ej["label"].is_string()) throw ParseError("label must be a string");
            ev.label = ej["label"].get<std::string>();
        }
        events.push_back(std::move(ev));
    }
}

nlohmann::json record_common_json(const std::string& id,
                                  const std::optional<TimestampTenths>& duration, Task task,
                                  const std::string& query,
                                  const std::vector<EventAnnotation>& events) {
    nlohmann::json j;
    j["id"] = id;
    if (duration) j["duration"] = tenths_to_seconds(*duration);
    j["task"] = std::string(task_to_string(task));
    if (!query.empty()) j["query"] = query;
    j["events"] = nlohmann::json::array();
    for (const EventAnnotation& ev : events) {
        nlohmann::json ej;
        ej["intervals"] = nlohmann::json::array();
        for (const Interval& iv : ev.intervals) {
            ej["intervals"].push_back(
                nlohmann::json::array({tenths_to_seconds(iv.start), tenths_to_seconds(iv.end)}));
        }
        ej["caption"] = ev.caption;
        if (!ev.label.empty()) ej["label"] = ev.label;
        j["events"].push_back(std::move(ej));
    }
    return j;
}

nlohmann::json parse_line(const std::string& line, const char* what) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

} // namespace

SampleRecord sample_record_from_json(const std::string& line) {
    const auto j = parse_line(line, "sample record");
    SampleRecord rec;
    read_common(j, rec.id, rec.duration, rec.task, rec.query, rec.events);
    validate_record(rec);
    return rec;
}

std::string sample_record_to_json(const SampleRecord& rec) {
    return record_common_json(rec.id, rec.duration, rec.task, rec.query, rec.events).dump();
}

PredictionRecord prediction_record_from_json(const std::string& line) {
    const auto j = parse_line(line, "prediction record");
    PredictionRecord rec;
    read_common(j, rec.id, rec.duration, rec.task, rec.query, rec.events);
    if (j.contains("raw_text")) {
        if (!j["raw_text"].is_string()) throw ParseError("raw_text must be a string");
        rec.raw_text = j["raw_text"].get<std::string>();
    }
    if (j.contains("parse_warnings")) {
        if (!j["parse_warnings"].is_array()) throw ParseError("parse_warnings must be an array");
        for (const auto& w : j["parse_warnings"]) {
            if (!w.is_string()) throw ParseError("parse_warnings must hold strings");
            rec.parse_warnings.push_back(w.get<std::string>());
        }
    }
    SampleRecord shell{rec.id, rec.duration, rec.task, rec.query, rec.events};
    validate_record(shell);
    return rec;
}

std::string prediction_record_to_json(const PredictionRecord& rec) {
    nlohmann::json j = record_common_json(rec.id, rec.duration, rec.task, rec.query, rec.events);
    j["raw_text"] = rec.raw_text;
    j["parse_warnings"] = rec.parse_warnings;
    return j.dump();
}

} // namespace timegrain
