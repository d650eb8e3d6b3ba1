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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdim/estimators.hpp"

namespace mdim {

/// Shortest decimal that round-trips the double; "nan"/"inf" spelled out.
std::string format_double(double x);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// Column names of estimate_csv_row, in order, newline-terminated.
std::string estimate_csv_header();

/// One newline-terminated CSV row; tau_total is written as a ';'-separated list in one field.
/// `replicates` fills the R column.
std::string estimate_csv_row(const DeltaEstimate& e, std::size_t replicates = 1);

/// JSON record {strategy, N, R, d, delta_hat, sigma2_hat, nu_hat, tau_total[],
/// n_evals, seed, replicate, output, sigma2_source}.
std::string estimate_json(const DeltaEstimate& e, std::size_t replicates = 1);

/// Reverse of estimate_json (used by schema checks).
DeltaEstimate parse_estimate_json(std::string_view json);

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines). A trailing
/// line terminator is ignored.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace mdim
