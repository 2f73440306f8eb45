// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace timegrain {

/// Flat tool configuration. The text form is one `key = value` per line,
/// '#' starts a comment, unknown keys are errors. load(dump()) is identity.
struct ToolConfig {
    double window_seconds = 30.0;
    std::size_t max_segments = 5;
    double max_duration = 120.0; // seconds
    std::size_t positions = 768; // time embedding rows
    std::size_t n_attentive = 22;
    std::size_t n_contextual = 4;
    std::size_t heads = 4;
    std::size_t d = 768;
    std::uint64_t seed = 42;
    double onset_collar = 0.2;              // seconds
    double offset_tolerance_fraction = 0.2; // of reference event length
    std::string label_map_path;

    bool operator==(const ToolConfig&) const = default;

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Fixed key order, every field present.
    std::string dump() const;

    // `set("heads", "8")`; value syntax and range checked.
    void set(const std::string& key, const std::string& value);

    // Reads text in the dump() format. Defaults apply to omitted keys.
    static ToolConfig parse(const std::string& text);
    static ToolConfig load(const std::string& path);
};

} // namespace timegrain
