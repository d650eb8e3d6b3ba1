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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdim/estimators.hpp"
#include "mdim/nn/index_maps.hpp"
#include "mdim/nn/network.hpp"

namespace mdim::nn {

struct ReportOptions {
  Strategy strategy = Strategy::WindingTruncated;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// A cell is degenerate when sigma2_hat <= variance_floor * scale^2, where
  /// scale is 1 for softmax outputs and the largest logit standard deviation
  /// under the same sampler for logits.
  double variance_floor = 1e-12;
  std::vector<Target> targets{Target::Logit, Target::Softmax};
};

struct ReportCell {
  std::string sampler;
  Target target = Target::Logit;
  std::size_t output = 0;
  double delta_hat = 0.0;
  double sigma2_hat = 0.0;
  double nu_hat = 0.0;  ///< NaN when degenerate
  bool degenerate = false;
  std::string flag;     ///< empty, "tiny_variance" or "nu_out_of_range"
};

struct MeanDimensionReport {
  std::size_t dims = 0;
  std::size_t classes = 0;
  Strategy strategy = Strategy::WindingTruncated;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> samplers;
  std::vector<ReportCell> cells;  ///< sampler-major, then target, then output

  const ReportCell& cell(std::string_view sampler, Target target, std::size_t y) const;
};

/// Estimated mean dimension of every (sampler, target, class) cell.
MeanDimensionReport mean_dimension_report(const Network& net, std::span<const Sampler> samplers,
                                          const ReportOptions& options);

/// Long format: sampler,target,y,nu_hat,delta_hat,sigma2_hat,degenerate,flag.
std::string report_csv(const MeanDimensionReport& report);

/// Wide format for one target: one row per sampler, one nu_hat column per
/// class; degenerate cells are written as "NA".
std::string report_wide_csv(const MeanDimensionReport& report, Target target);

}  // namespace mdim::nn
