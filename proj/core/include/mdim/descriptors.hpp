// Copyright 2026 The meandim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mdim/sampling.hpp"
#include "mdim/testfns.hpp"

namespace mdim {

/// Parses an input-model description:
///   {"d": 3, "coords": [{"kind": "uniform01"}, ...]}
/// Coordinate kinds: uniform01, bernoulli01, std_gaussian,
///   histogram {"edges": [...], "probs": [...], "mode": "continuous"|"atoms"},
///   finite {"values": [...], "probs": [...]}.
/// "coords" may also be a single object applied to all d coordinates, and a
/// model may instead name a pixel-histogram file:
///   {"histogram_file": "h3.mdhs", "mode": "atoms"}
/// Relative file paths resolve against `base_dir`.
/// Throws FormatError on malformed input.
InputModel parse_input_model(std::string_view json, const std::filesystem::path& base_dir = {});

/// Parses a test-function descriptor:
///   {"kind": "additive", "mu": 0, "factors": [...]}
///   {"kind": "product", "factors": [...]}
///   {"kind": "sobol_g", "a": [0, 0]}
///   {"kind": "two_norm", "d": 4}
///   {"kind": "discrete", "model": {...}, "table": [...]}
/// A factor is {"dist": <coord>, "g": {"kind": "identity"|"affine"|"sobol_g"|
/// "constant", ...}}; "g" defaults to identity.
TestFunction parse_test_function(std::string_view json);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mdim
