// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"

#include <algorithm>

namespace testgen {

using timegrain::EventAnnotation;
using timegrain::Interval;
using timegrain::SampleRecord;
using timegrain::Task;

namespace {

const char* const word_pool[] = {
    "music",  "plays",   "softly",  "speech",   "voice",   "speaks", "dog",    "barks",
    "loudly", "cough",   "baby",    "cries",    "siren",   "wails",  "alarm",  "rings",
    "steady", "rain",    "falls",   "wind",     "howls",   "car",    "engine", "hums",
    "crowd",  "cheers",  "briefly", "door",     "slams",   "steps",  "echo",   "bird",
    "sings",  "water",   "drips",   "thunder",  "rolls",   "glass",  "clinks", "bell",
    "tolls",  "quietly", "nearby",  "distant",  "again",   "twice",  "fades",  "rises",
};
constexpr std::size_t pool_size = sizeof(word_pool) / sizeof(word_pool[0]);

const char* const label_pool[] = {"music", "speech", "animal", "human", "alarm", "other"};

} // namespace

std::string caption(Rng& rng) {
    const std::size_t words = rng.range(2, 6);
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) out += ' ';
        out += word_pool[rng.range(0, pool_size - 1)];
    }
    return out;
}

std::vector<Interval> interval_chain(Rng& rng, std::size_t count, std::uint64_t limit_tenths) {
    std::vector<Interval> out;
    std::uint64_t t = rng.range(0, 20);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t len = rng.range(1, 80);
        if (t + len > limit_tenths) break;
        out.push_back({t, t + len});
        t = t + len + rng.range(0, 30);
    }
    if (out.empty()) out.push_back({0, std::min<std::uint64_t>(limit_tenths, 10)});
    return out;
}

SampleRecord dense_record(Rng& rng, const std::string& id) {
    SampleRecord rec;
    rec.id = id;
    rec.task = Task::dense_caption;
    const std::size_t events = rng.range(1, 4);
    std::uint64_t max_end = 0;
    for (std::size_t e = 0; e < events; ++e) {
        EventAnnotation ev;
        ev.intervals = interval_chain(rng, rng.range(1, 3), 1200);
        ev.caption = caption(rng);
        if (rng.chance(0.4)) ev.label = label_pool[rng.range(0, 5)];
        max_end = std::max(max_end, ev.intervals.back().end);
        rec.events.push_back(std::move(ev));
    }
    if (rng.chance(0.5)) rec.duration = max_end + rng.range(0, 100);
    return rec;
}

SampleRecord grounding_record(Rng& rng, const std::string& id) {
    SampleRecord rec;
    rec.id = id;
    rec.task = Task::grounding;
    rec.query = caption(rng);
    EventAnnotation ev;
    ev.intervals = interval_chain(rng, rng.range(1, 4), 1200);
    rec.events.push_back(std::move(ev));
    if (rng.chance(0.5)) rec.duration = rec.events.front().intervals.back().end + rng.range(0, 100);
    return rec;
}

SampleRecord summary_record(Rng& rng, const std::string& id) {
    SampleRecord rec;
    rec.id = id;
    rec.task = Task::summarization;
    const std::size_t events = rng.range(1, 4);
    std::uint64_t t = 0;
    for (std::size_t e = 0; e < events; ++e) {
        EventAnnotation ev;
        const std::uint64_t len = rng.range(5, 400);
        ev.intervals.push_back({t, t + len});
        ev.caption = caption(rng);
        rec.events.push_back(std::move(ev));
        t = t + len + (rng.chance(0.5) ? 0 : rng.range(1, 50));
    }
    if (rng.chance(0.5)) rec.duration = t + rng.range(0, 100);
    return rec;
}

SampleRecord tqa_record(Rng& rng, const std::string& id) {
    SampleRecord rec;
    rec.id = id;
    rec.task = Task::tqa;
    rec.query = caption(rng) + "?";
    EventAnnotation ev;
    ev.caption = caption(rng);
    rec.events.push_back(std::move(ev));
    return rec;
}

SampleRecord record_for(Task task, Rng& rng, const std::string& id) {
    switch (task) {
    case Task::dense_caption: return dense_record(rng, id);
    case Task::grounding: return grounding_record(rng, id);
    case Task::summarization: return summary_record(rng, id);
    case Task::tqa: return tqa_record(rng, id);
    }
    return dense_record(rng, id);
}

} // namespace testgen
