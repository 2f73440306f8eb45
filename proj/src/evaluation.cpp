// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "timegrain/errors.hpp"

namespace timegrain {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
    for (const Interval& iv : intervals) {
        if (iv.start > iv.end) throw ArgumentError("interval start after end");
    }
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
        return a.start < b.start || (a.start == b.start && a.end < b.end);
    });
    for (const Interval& iv : intervals) {
        if (!intervals_.empty() && iv.start <= intervals_.back().end) {
            intervals_.back().end = std::max(intervals_.back().end, iv.end);
        } else {
            intervals_.push_back(iv);
        }
    }
    for (const Interval& iv : intervals_) total_ += iv.end - iv.start;
}

double iou(const IntervalSet& a, const IntervalSet& b) {
    TimestampTenths inter = 0;
    std::size_t i = 0, j = 0;
    const auto& as = a.intervals();
    const auto& bs = b.intervals();
    while (i < as.size() && j < bs.size()) {
        const TimestampTenths lo = std::max(as[i].start, bs[j].start);
        const TimestampTenths hi = std::min(as[i].end, bs[j].end);
        if (hi > lo) inter += hi - lo;
        if (as[i].end < bs[j].end) {
            ++i;
        } else {
            ++j;
        }
    }
    const TimestampTenths uni = a.total_tenths() + b.total_tenths() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double miou(std::span<const std::pair<IntervalSet, IntervalSet>> pairs) {
    if (pairs.empty()) throw ArgumentError("miou needs at least one pair");
    double sum = 0.0;
    for (const auto& [a, b] : pairs) sum += iou(a, b);
    return sum / static_cast<double>(pairs.size());
}

std::vector<std::pair<double, double>>
recall_at(std::span<const std::pair<IntervalSet, IntervalSet>> pairs,
          std::span<const double> thresholds) {
    if (pairs.empty()) throw ArgumentError("recall_at needs at least one pair");
    std::vector<double> ious;
    ious.reserve(pairs.size());
    for (const auto& [a, b] : pairs) ious.push_back(iou(a, b));

    std::vector<std::pair<double, double>> out;
    out.reserve(thresholds.size());
    for (double tau : thresholds) {
        std::size_t hits = 0;
        for (double v : ious) {
            if (v >= tau) ++hits;
        }
        out.emplace_back(tau, static_cast<double>(hits) / static_cast<double>(pairs.size()));
    }
    return out;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
    }
    return out;
}

} // namespace

LabelMap LabelMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label map " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const std::size_t sep = line.find("=>");
        if (sep == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'pattern => category'");
        }
        auto field = [&](std::size_t from, std::size_t to) {
            std::size_t x = line.find_first_not_of(" \t\r", from);
            if (x == std::string::npos || x >= to) return std::string();
            std::size_t y = line.find_last_not_of(" \t\r", to - 1);
            return line.substr(x, y - x + 1);
        };
        const std::string pattern = field(0, sep);
        const std::string category = field(sep + 2, line.size());
        if (pattern.empty() || category.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty pattern or category");
        }
        pairs.emplace_back(pattern, category);
    }
    return from_pairs(std::move(pairs));
}

LabelMap LabelMap::from_pairs(std::vector<std::pair<std::string, std::string>> pairs) {
    LabelMap m;
    for (auto& [pattern, category] : pairs) {
        if (pattern.empty() || category.empty()) throw ConfigError("empty pattern or category");
        m.patterns_.emplace_back(lower_ascii(pattern), std::move(category));
    }
    return m;
}

std::string LabelMap::category_for(const std::string& caption) const {
    const std::string hay = lower_ascii(caption);
    for (const auto& [pattern, category] : patterns_) {
        if (hay.find(pattern) != std::string::npos) return category;
    }
    return "other";
}

std::string LabelMap::effective_label(const EventAnnotation& ev) const {
    return ev.label.empty() ? category_for(ev.caption) : ev.label;
}

namespace {

struct EbEvent {
    TimestampTenths onset = 0;
    TimestampTenths offset = 0;
    std::string label;
};

std::vector<EbEvent> eb_events(const SampleRecord& rec, const LabelMap& labels) {
    std::vector<EbEvent> out;
    for (const EventAnnotation& ev : rec.events) {
        const std::string label = labels.effective_label(ev);
        for (const Interval& iv : ev.intervals) out.push_back({iv.start, iv.end, label});
    }
    std::sort(out.begin(), out.end(), [](const EbEvent& a, const EbEvent& b) {
        if (a.onset != b.onset) return a.onset < b.onset;
        if (a.offset != b.offset) return a.offset < b.offset;
        return a.label < b.label;
    });
    return out;
}

bool eb_match(const EbEvent& pred, const EbEvent& ref, const MatchConfig& cfg) {
    if (pred.label != ref.label) return false;
    const double onset_tol = cfg.onset_collar * 10.0 + 1e-9;
    const double len = static_cast<double>(ref.offset - ref.onset);
    const double offset_tol =
        std::max(cfg.onset_collar * 10.0, cfg.offset_tolerance_fraction * len) + 1e-9;
    const double d_on = pred.onset > ref.onset ? static_cast<double>(pred.onset - ref.onset)
                                               : static_cast<double>(ref.onset - pred.onset);
    const double d_off = pred.offset > ref.offset ? static_cast<double>(pred.offset - ref.offset)
                                                  : static_cast<double>(ref.offset - pred.offset);
    return d_on <= onset_tol && d_off <= offset_tol;
}

struct EbCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

EbCounts eb_count_sample(const SampleRecord& pred, const SampleRecord& ref, const MatchConfig& cfg,
                         const LabelMap& labels) {
    const auto ps = eb_events(pred, labels);
    const auto rs = eb_events(ref, labels);
    std::vector<bool> used(rs.size(), false);
    EbCounts c;
    for (const EbEvent& p : ps) {
        bool matched = false;
        for (std::size_t r = 0; r < rs.size(); ++r) {
            if (used[r] || !eb_match(p, rs[r], cfg)) continue;
            used[r] = true;
            matched = true;
            break;
        }
        matched ? ++c.tp : ++c.fp;
    }
    c.fn = rs.size() - c.tp;
    return c;
}

F1Scores f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    F1Scores s;
    if (tp + fp == 0 && tp + fn == 0) {
        // Nothing predicted, nothing to predict.
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

// Pairs each reference with the prediction of the same id; missing
// predictions count as empty records.
std::vector<std::pair<const SampleRecord*, const SampleRecord*>>
align_by_id(std::span<const SampleRecord> preds, std::span<const SampleRecord> refs) {
    std::unordered_map<std::string, const SampleRecord*> by_id;
    for (const SampleRecord& p : preds) {
        if (!by_id.emplace(p.id, &p).second) throw InputError("duplicate prediction id " + p.id);
    }
    std::unordered_set<std::string> ref_ids;
    for (const SampleRecord& r : refs) {
        if (!ref_ids.insert(r.id).second) throw InputError("duplicate reference id " + r.id);
    }
    std::vector<std::string> unmatched;
    for (const SampleRecord& p : preds) {
        if (!ref_ids.contains(p.id)) unmatched.push_back(p.id);
    }
    if (!unmatched.empty()) {
        std::sort(unmatched.begin(), unmatched.end());
        std::string msg = "prediction ids without references:";
        for (const std::string& id : unmatched) msg += " " + id;
        throw InputError(msg);
    }
    static const SampleRecord empty_record{};
    std::vector<std::pair<const SampleRecord*, const SampleRecord*>> out;
    out.reserve(refs.size());
    for (const SampleRecord& r : refs) {
        const auto it = by_id.find(r.id);
        out.emplace_back(it == by_id.end() ? &empty_record : it->second, &r);
    }
    return out;
}

} // namespace

F1Scores event_based_f1(std::span<const SampleRecord> preds, std::span<const SampleRecord> refs,
                        const MatchConfig& cfg, const LabelMap& labels) {
    EbCounts total;
    for (const auto& [pred, ref] : align_by_id(preds, refs)) {
        const EbCounts c = eb_count_sample(*pred, *ref, cfg, labels);
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn += c.fn;
    }
    return f1_from_counts(total.tp, total.fp, total.fn);
}

namespace {

std::set<std::string> sample_categories(const SampleRecord& rec, const LabelMap& labels) {
    std::set<std::string> out;
    for (const EventAnnotation& ev : rec.events) out.insert(labels.effective_label(ev));
    return out;
}

} // namespace

double clip_macro_f1(std::span<const SampleRecord> preds, std::span<const SampleRecord> refs,
                     const LabelMap& labels) {
    const auto pairs = align_by_id(preds, refs);
    std::vector<std::pair<std::set<std::string>, std::set<std::string>>> sets;
    sets.reserve(pairs.size());
    std::set<std::string> categories;
    for (const auto& [pred, ref] : pairs) {
        auto pc = sample_categories(*pred, labels);
        auto rc = sample_categories(*ref, labels);
        categories.insert(pc.begin(), pc.end());
        categories.insert(rc.begin(), rc.end());
        sets.emplace_back(std::move(pc), std::move(rc));
    }
    if (categories.empty()) return 1.0; // no events anywhere, vacuous agreement

    double sum = 0.0;
    for (const std::string& cat : categories) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& [pc, rc] : sets) {
            const bool in_pred = pc.contains(cat);
            const bool in_ref = rc.contains(cat);
            if (in_pred && in_ref) ++tp;
            if (in_pred && !in_ref) ++fp;
            if (!in_pred && in_ref) ++fn;
        }
        sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    }
    return sum / static_cast<double>(categories.size());
}

std::vector<std::string> tokenize_text(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (alnum) {
            cur += c;
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        }
        // anything else is punctuation: deleted, not a separator
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

namespace {

double f_measure(double overlap, std::size_t cand_len, std::size_t ref_len) {
    if (cand_len == 0 || ref_len == 0 || overlap == 0.0) return 0.0;
    const double p = overlap / static_cast<double>(cand_len);
    const double r = overlap / static_cast<double>(ref_len);
    return 2.0 * p * r / (p + r);
}

} // namespace

double rouge1(const std::string& candidate, const std::string& reference) {
    const auto c = tokenize_text(candidate);
    const auto r = tokenize_text(reference);
    std::unordered_map<std::string, std::size_t> ref_counts;
    for (const std::string& w : r) ++ref_counts[w];
    std::size_t overlap = 0;
    for (const std::string& w : c) {
        const auto it = ref_counts.find(w);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return f_measure(static_cast<double>(overlap), c.size(), r.size());
}

double rougeL(const std::string& candidate, const std::string& reference) {
    const auto c = tokenize_text(candidate);
    const auto r = tokenize_text(reference);
    if (c.empty() || r.empty()) return 0.0;
    // Two-row LCS table.
    std::vector<std::size_t> prev(r.size() + 1, 0), cur(r.size() + 1, 0);
    for (std::size_t i = 1; i <= c.size(); ++i) {
        for (std::size_t j = 1; j <= r.size(); ++j) {
            cur[j] = c[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return f_measure(static_cast<double>(prev[r.size()]), c.size(), r.size());
}

namespace {

std::vector<SampleRecord> read_records(const std::string& path, Task task) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<SampleRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        SampleRecord rec;
        try {
            rec = sample_record_from_json(line);
        } catch (const Error& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (rec.task != task) {
            throw InputError(path + ":" + std::to_string(lineno) + ": record " + rec.id +
                             " has task " + std::string(task_to_string(rec.task)) + ", expected " +
                             std::string(task_to_string(task)));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

IntervalSet union_set(const SampleRecord& rec) {
    std::vector<Interval> ivs;
    for (const EventAnnotation& ev : rec.events) {
        ivs.insert(ivs.end(), ev.intervals.begin(), ev.intervals.end());
    }
    return IntervalSet(std::move(ivs));
}

std::string summary_text(const SampleRecord& rec) {
    std::string out;
    for (const EventAnnotation& ev : rec.events) {
        if (!out.empty()) out += ' ';
        out += ev.caption;
    }
    return out;
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

EvalReport evaluate_task(const std::string& preds_path, const std::string& refs_path, Task task,
                         const EvalOptions& options) {
    if (task == Task::tqa) throw ArgumentError("tqa has no metric suite");

    const auto preds = read_records(preds_path, task);
    const auto refs = read_records(refs_path, task);
    if (refs.empty()) throw InputError(refs_path + ": no reference records");

    const auto pairs = align_by_id(preds, refs);

    EvalReport report;
    report.task = task;
    report.n_samples = refs.size();
    {
        std::unordered_set<std::string> pred_ids;
        for (const SampleRecord& p : preds) pred_ids.insert(p.id);
        for (const SampleRecord& r : refs) {
            if (!pred_ids.contains(r.id)) report.missing_prediction_ids.push_back(r.id);
        }
        std::sort(report.missing_prediction_ids.begin(), report.missing_prediction_ids.end());
    }

    switch (task) {
    case Task::dense_caption: {
        EbCounts total;
        for (const auto& [pred, ref] : pairs) {
            const EbCounts c = eb_count_sample(*pred, *ref, options.match, options.labels);
            total.tp += c.tp;
            total.fp += c.fp;
            total.fn += c.fn;
            report.per_sample.emplace_back(
                ref->id, std::map<std::string, double>{{"eb_fn", static_cast<double>(c.fn)},
                                                       {"eb_fp", static_cast<double>(c.fp)},
                                                       {"eb_tp", static_cast<double>(c.tp)}});
        }
        const F1Scores s = f1_from_counts(total.tp, total.fp, total.fn);
        report.metrics = {{"at_f1", clip_macro_f1(preds, refs, options.labels)},
                          {"eb_f1", s.f1},
                          {"eb_precision", s.precision},
                          {"eb_recall", s.recall}};
        report.notes.push_back("eb collars: onset " + format_seconds(options.match.onset_collar) +
                               "s, offset max(onset collar, " +
                               format_seconds(options.match.offset_tolerance_fraction * 100.0) +
                               "% of reference event length)");
        report.notes.push_back("event categories come from explicit labels, else the label map");
        break;
    }
    case Task::grounding: {
        std::vector<std::pair<IntervalSet, IntervalSet>> sets;
        sets.reserve(pairs.size());
        for (const auto& [pred, ref] : pairs) {
            sets.emplace_back(union_set(*pred), union_set(*ref));
            report.per_sample.emplace_back(
                ref->id, std::map<std::string, double>{{"iou", iou(sets.back().first, sets.back().second)}});
        }
        const double thresholds[] = {0.5, 0.7, 0.9};
        report.metrics["miou"] = miou(sets);
        for (const auto& [tau, r] : recall_at(sets, thresholds)) {
            report.metrics["r@" + format_seconds(tau)] = r;
        }
        report.notes.push_back("grounding scored per query over the union of its intervals");
        break;
    }
    case Task::summarization: {
        std::vector<std::pair<IntervalSet, IntervalSet>> sets;
        double r1 = 0.0, rl = 0.0;
        for (const auto& [pred, ref] : pairs) {
            const double s1 = rouge1(summary_text(*pred), summary_text(*ref));
            const double sl = rougeL(summary_text(*pred), summary_text(*ref));
            sets.emplace_back(union_set(*pred), union_set(*ref));
            const double si = iou(sets.back().first, sets.back().second);
            r1 += s1;
            rl += sl;
            report.per_sample.emplace_back(ref->id,
                                           std::map<std::string, double>{
                                               {"iou", si}, {"rouge1", s1}, {"rougeL", sl}});
        }
        const auto n = static_cast<double>(pairs.size());
        report.metrics = {{"rouge1", r1 / n},
                          {"rougeL", rl / n},
                          {"timeline_miou", miou(sets)}};
        report.notes.push_back("timeline iou computed over the union of summary segments");
        break;
    }
    case Task::tqa:
        break; // rejected above
    }

    std::sort(report.per_sample.begin(), report.per_sample.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["task"] = std::string(task_to_string(task));
    j["n_samples"] = n_samples;
    j["metrics"] = metrics;
    auto samples = nlohmann::json::array();
    for (const auto& [id, vals] : per_sample) {
        nlohmann::json s;
        s["id"] = id;
        s["metrics"] = vals;
        samples.push_back(std::move(s));
    }
    j["per_sample"] = std::move(samples);
    j["notes"] = notes;
    j["missing_prediction_ids"] = missing_prediction_ids;
    return j.dump(2);
}

std::string EvalReport::to_table() const {
    std::string out = "task: " + std::string(task_to_string(task)) +
                      "  samples: " + std::to_string(n_samples) + "\n";
    out += "metric                      value\n";
    out += "--------------------------  --------\n";
    for (const auto& [name, value] : metrics) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-26s  %.6f\n", name.c_str(), value);
        out += buf;
    }
    if (!missing_prediction_ids.empty()) {
        out += "missing predictions:";
        for (const std::string& id : missing_prediction_ids) out += " " + id;
        out += "\n";
    }
    for (const std::string& note : notes) out += "note: " + note + "\n";
    return out;
}

} // namespace timegrain
