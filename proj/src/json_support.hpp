// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared JSON <-> core-type helpers. Kept out of the public headers so the
// vendored JSON library stays an implementation detail.
#pragma once

#include "json.hpp"

#include "timegrain/matrix.hpp"

namespace timegrain {

Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);

} // namespace timegrain
