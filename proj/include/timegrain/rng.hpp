// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace timegrain {

// Uniform double in [0, 1) from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation-defined, so seeded
// streams would not reproduce across standard libraries; this does.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [-1, 1).
inline double uniform_symmetric(std::mt19937_64& rng) {
    return 2.0 * uniform_unit(rng) - 1.0;
}

} // namespace timegrain
