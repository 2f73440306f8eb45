// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace timegrain {

inline constexpr const char* version_string = "0.1.0";

} // namespace timegrain
