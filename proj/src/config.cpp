// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "timegrain/errors.hpp"

namespace timegrain {

namespace {

std::string trim(std::string_view s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

std::string render_double(double v) {
    char buf[64];
    // Shortest string that parses back to exactly v.
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void ToolConfig::validate() const {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + ": must be positive");
    };
    positive("window_seconds", window_seconds);
    positive("max_duration", max_duration);
    if (max_segments == 0) throw ConfigError("max_segments: must be positive");
    if (positions == 0) throw ConfigError("positions: must be positive");
    if (n_attentive == 0) throw ConfigError("n_attentive: must be positive");
    if (heads == 0) throw ConfigError("heads: must be positive");
    if (d == 0) throw ConfigError("d: must be positive");
    if (d % heads != 0) throw ConfigError("d: must be divisible by heads");
    if (onset_collar < 0.0 || !std::isfinite(onset_collar)) {
        throw ConfigError("onset_collar: must be non-negative");
    }
    if (offset_tolerance_fraction < 0.0 || !std::isfinite(offset_tolerance_fraction)) {
        throw ConfigError("offset_tolerance_fraction: must be non-negative");
    }
}

std::string ToolConfig::dump() const {
    std::string out;
    out += "window_seconds = " + render_double(window_seconds) + "\n";
    out += "max_segments = " + std::to_string(max_segments) + "\n";
    out += "max_duration = " + render_double(max_duration) + "\n";
    out += "positions = " + std::to_string(positions) + "\n";
    out += "n_attentive = " + std::to_string(n_attentive) + "\n";
    out += "n_contextual = " + std::to_string(n_contextual) + "\n";
    out += "heads = " + std::to_string(heads) + "\n";
    out += "d = " + std::to_string(d) + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "onset_collar = " + render_double(onset_collar) + "\n";
    out += "offset_tolerance_fraction = " + render_double(offset_tolerance_fraction) + "\n";
    out += "label_map_path = " + label_map_path + "\n";
    return out;
}

void ToolConfig::set(const std::string& key, const std::string& value) {
    if (key == "window_seconds") {
        window_seconds = parse_double(key, value);
    } else if (key == "max_segments") {
        max_segments = parse_count(key, value);
    } else if (key == "max_duration") {
        max_duration = parse_double(key, value);
    } else if (key == "positions") {
        positions = parse_count(key, value);
    } else if (key == "n_attentive") {
        n_attentive = parse_count(key, value);
    } else if (key == "n_contextual") {
        n_contextual = parse_count(key, value);
    } else if (key == "heads") {
        heads = parse_count(key, value);
    } else if (key == "d") {
        d = parse_count(key, value);
    } else if (key == "seed") {
        seed = parse_count(key, value);
    } else if (key == "onset_collar") {
        onset_collar = parse_double(key, value);
    } else if (key == "offset_tolerance_fraction") {
        offset_tolerance_fraction = parse_double(key, value);
    } else if (key == "label_map_path") {
        label_map_path = value;
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

ToolConfig ToolConfig::parse(const std::string& text) {
    ToolConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        try {
            cfg.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ToolConfig ToolConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace timegrain
