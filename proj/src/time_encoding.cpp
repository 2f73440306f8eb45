// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/time_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>

#include "json.hpp"

#include "json_support.hpp"
#include "timegrain/errors.hpp"
#include "timegrain/rng.hpp"

namespace timegrain {

namespace {

std::uint32_t rd_u32(const std::string& b, std::size_t at) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t rd_u16(const std::string& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      static_cast<unsigned char>(b[at + 1]) << 8);
}

void wr_u32(std::string& b, std::uint32_t v) {
    b.push_back(static_cast<char>(v & 0xff));
    b.push_back(static_cast<char>(v >> 8 & 0xff));
    b.push_back(static_cast<char>(v >> 16 & 0xff));
    b.push_back(static_cast<char>(v >> 24 & 0xff));
}

void wr_u16(std::string& b, std::uint16_t v) {
    b.push_back(static_cast<char>(v & 0xff));
    b.push_back(static_cast<char>(v >> 8 & 0xff));
}

} // namespace

AudioClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path);

    if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
        throw InputError(path + " is not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint32_t sample_rate = 0;
    std::size_t data_at = 0, data_len = 0;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::string id = bytes.substr(pos, 4);
        const std::uint32_t len = rd_u32(bytes, pos + 4);
        pos += 8;
        if (pos + len > bytes.size()) throw InputError(path + ": chunk overruns file");
        if (id == "fmt ") {
            if (len < 16) throw InputError(path + ": fmt chunk too short");
            const std::uint16_t format = rd_u16(bytes, pos);
            const std::uint16_t channels = rd_u16(bytes, pos + 2);
            sample_rate = rd_u32(bytes, pos + 4);
            const std::uint16_t bits = rd_u16(bytes, pos + 14);
            if (format != 1) throw InputError(path + ": only PCM supported");
            if (channels != 1) throw InputError(path + ": only mono supported");
            if (bits != 16) throw InputError(path + ": only 16-bit samples supported");
            if (sample_rate == 0) throw InputError(path + ": zero sample rate");
            have_fmt = true;
        } else if (id == "data") {
            data_at = pos;
            data_len = len;
            have_data = true;
        }
        pos += len + (len & 1); // chunks are word-aligned
    }
    if (!have_fmt || !have_data) throw InputError(path + ": missing fmt or data chunk");
    if (data_len % 2 != 0) throw InputError(path + ": odd data length for 16-bit samples");

    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.reserve(data_len / 2);
    for (std::size_t i = 0; i < data_len; i += 2) {
        const auto u = static_cast<std::uint16_t>(rd_u16(bytes, data_at + i));
        const auto s = static_cast<std::int16_t>(u);
        clip.samples.push_back(static_cast<double>(s) / 32768.0);
    }
    return clip;
}

void write_wav(const AudioClip& clip, const std::string& path) {
    if (clip.sample_rate == 0) throw ArgumentError("sample rate must be positive");
    std::string body;
    body.reserve(44 + clip.samples.size() * 2);
    body += "RIFF";
    wr_u32(body, static_cast<std::uint32_t>(36 + clip.samples.size() * 2));
    body += "WAVEfmt ";
    wr_u32(body, 16);
    wr_u16(body, 1); // PCM
    wr_u16(body, 1); // mono
    wr_u32(body, clip.sample_rate);
    wr_u32(body, clip.sample_rate * 2);
    wr_u16(body, 2);
    wr_u16(body, 16);
    body += "data";
    wr_u32(body, static_cast<std::uint32_t>(clip.samples.size() * 2));
    for (double v : clip.samples) {
        const double c = std::clamp(v, -1.0, 1.0);
        const auto s = static_cast<std::int16_t>(std::lround(c * 32767.0));
        wr_u16(body, static_cast<std::uint16_t>(s));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("write failed on " + path);
}

SegmentationResult segment_clip(const AudioClip& clip, double window_seconds,
                                std::size_t max_segments) {
    if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) {
        throw ArgumentError("window_seconds must be positive");
    }
    if (max_segments < 1) throw ArgumentError("max_segments must be at least 1");
    if (clip.sample_rate == 0) throw ArgumentError("sample rate must be positive");

    SegmentationResult out;
    const std::size_t n = clip.samples.size();
    if (n == 0) return out;

    const auto ws = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(window_seconds * clip.sample_rate)));
    for (std::size_t i = 0; i < max_segments; ++i) {
        const std::size_t begin = i * ws;
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + ws);
        Segment seg;
        seg.index = i;
        seg.start_time = static_cast<double>(i) * window_seconds;
        seg.sample_rate = clip.sample_rate;
        seg.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                           clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
        out.segments.push_back(std::move(seg));
    }
    out.truncated = n > max_segments * ws;
    return out;
}

SyntheticExtractor::SyntheticExtractor(std::uint64_t seed, std::size_t d1, std::size_t d2)
    : d1_(d1), d2_(d2) {
    if (d1 == 0 || d2 == 0) throw ArgumentError("stream widths must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> v1(6 * d1), v2(6 * d2);
    for (double& x : v1) x = uniform_symmetric(rng);
    for (double& x : v2) x = uniform_symmetric(rng);
    map1_ = Matrix(6, d1, std::move(v1));
    map2_ = Matrix(6, d2, std::move(v2));
}

std::pair<Matrix, Matrix> SyntheticExtractor::extract(const Segment& seg) const {
    if (seg.sample_rate == 0) throw ArgumentError("sample rate must be positive");
    const std::size_t n = seg.samples.size();
    if (n == 0) return {Matrix(0, d1_), Matrix(0, d2_)};

    const auto win = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(0.1 * seg.sample_rate)));
    const std::size_t frames = (n + win - 1) / win;

    // Six statistics per 0.1 s window, each exactly zero on silent input so
    // the seeded projections preserve that zero.
    Matrix stats(frames, 6);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t begin = f * win;
        const std::size_t end = std::min(n, begin + win);
        const auto count = static_cast<double>(end - begin);
        double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0;
        double mx = seg.samples[begin], mn = seg.samples[begin];
        for (std::size_t i = begin; i < end; ++i) {
            const double x = seg.samples[i];
            sum += x;
            abs_sum += std::abs(x);
            sq_sum += x * x;
            mx = std::max(mx, x);
            mn = std::min(mn, x);
        }
        stats(f, 0) = sum / count;
        stats(f, 1) = abs_sum / count;
        stats(f, 2) = std::sqrt(sq_sum / count);
        stats(f, 3) = mx;
        stats(f, 4) = mn;
        stats(f, 5) = 0.5 * (seg.samples[begin] + seg.samples[end - 1]);
    }
    return {matmul(stats, map1_), matmul(stats, map2_)};
}

Matrix extract_features(const Segment& seg, const FeatureExtractor& extractor) {
    auto [s1, s2] = extractor.extract(seg);
    if (s1.rows() != s2.rows()) {
        throw ExtractorError("stream frame counts differ: " + std::to_string(s1.rows()) + " vs " +
                             std::to_string(s2.rows()));
    }
    Matrix out(s1.rows(), s1.cols() + s2.cols());
    for (std::size_t f = 0; f < s1.rows(); ++f) {
        for (std::size_t c = 0; c < s1.cols(); ++c) out(f, c) = s1(f, c);
        for (std::size_t c = 0; c < s2.cols(); ++c) out(f, s1.cols() + c) = s2(f, c);
    }
    return out;
}

TimeEmbeddingTable::TimeEmbeddingTable(std::size_t positions, std::size_t width)
    : table_(positions, width) {
    if (positions == 0 || width == 0) throw ArgumentError("table must be non-empty");
}

TimeEmbeddingTable TimeEmbeddingTable::from_matrix(Matrix table) {
    if (table.empty()) throw ArgumentError("table must be non-empty");
    return TimeEmbeddingTable(std::move(table));
}

std::size_t time_index(double t_seconds, std::size_t positions) {
    if (positions == 0) throw ArgumentError("positions must be positive");
    if (std::isnan(t_seconds) || t_seconds < 0.0) throw ArgumentError("time must be non-negative");
    const auto last = positions - 1;
    if (t_seconds >= static_cast<double>(last)) return last; // also absorbs +inf
    return static_cast<std::size_t>(std::llround(t_seconds));
}

Matrix apply_time_encoding(const Matrix& w, const TimeEmbeddingTable& table, double t_seconds) {
    if (w.cols() != table.width()) {
        throw ShapeError("feature width " + std::to_string(w.cols()) + " vs table width " +
                         std::to_string(table.width()));
    }
    const std::size_t j = time_index(t_seconds, table.positions());
    const auto offset = table.table().row(j);
    Matrix out = w;
    for (std::size_t f = 0; f < out.rows(); ++f) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            // Skipping zero offsets keeps a zero table a bit-exact identity,
            // signed zeros in the input included.
            if (offset[c] != 0.0) out(f, c) += offset[c];
        }
    }
    return out;
}

FeatureRecord feature_record_from_json(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("feature record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("duration") || !j.contains("segments")) {
        throw ParseError("feature record requires id, duration, segments");
    }
    if (!j["id"].is_string() || !j["duration"].is_number() || !j["segments"].is_array()) {
        throw ParseError("feature record field types are wrong");
    }
    FeatureRecord rec;
    rec.id = j["id"].get<std::string>();
    rec.duration = j["duration"].get<double>();
    if (rec.id.empty()) throw ParseError("feature record id is empty");
    if (!(rec.duration >= 0.0) || !std::isfinite(rec.duration)) {
        throw ParseError("feature record duration must be non-negative");
    }
    std::size_t index = 0;
    for (const auto& s : j["segments"]) {
        if (!s.is_object() || !s.contains("start") || !s.contains("features") ||
            !s["start"].is_number()) {
            throw ParseError("feature segment requires start and features");
        }
        Segment seg;
        seg.index = index++;
        seg.start_time = s["start"].get<double>();
        if (!(seg.start_time >= 0.0) || !std::isfinite(seg.start_time)) {
            throw ParseError("feature segment start must be non-negative");
        }
        seg.features = matrix_from_json(s["features"]);
        rec.segments.push_back(std::move(seg));
    }
    return rec;
}

std::string feature_record_to_json(const FeatureRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["duration"] = rec.duration;
    j["segments"] = nlohmann::json::array();
    for (const Segment& seg : rec.segments) {
        nlohmann::json s;
        s["start"] = seg.start_time;
        s["features"] = matrix_to_json(seg.features);
        j["segments"].push_back(std::move(s));
    }
    return j.dump();
}

} // namespace timegrain
