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
#include <filesystem>
#include <string>
#include <vector>

#include "mdim/estimators.hpp"
#include "mdim/nn/histograms.hpp"
#include "mdim/nn/network.hpp"

namespace mdim::nn {

/// A named pixel input distribution.
struct Sampler {
  std::string name;
  InputModel model;
};

/// Salt and pepper: every pixel uniform on {0, 1}.
Sampler binary_sampler(std::size_t pixels);
/// Random gray: every pixel U(0, 1).
Sampler uniform_sampler(std::size_t pixels);
Sampler histogram_sampler(const PixelHistograms& set, HistogramMode mode);

enum class IndexKind { Lower, Total };

std::string_view to_string(IndexKind k) noexcept;
IndexKind parse_index_kind(std::string_view name);

/// Per-pixel Sobol' indices of one classifier output.
struct IndexMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  ///< row-major
  Target target = Target::Logit;
  std::size_t output = 0;
  std::string sampler;
  IndexKind kind = IndexKind::Total;
  Strategy strategy = Strategy::WindingTruncated;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double sigma2_hat = 0.0;
};

struct IndexMapOptions {
  Strategy strategy = Strategy::WindingTruncated;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Maps for every class of `target` from one pass of the estimator.
std::vector<IndexMap> index_maps(const Network& net, Target target, const Sampler& sampler,
                                 IndexKind kind, const IndexMapOptions& options);

IndexMap index_map(const Network& net, std::size_t y, Target target, const Sampler& sampler,
                   IndexKind kind, const IndexMapOptions& options);

/// Binary 16-bit PGM (P5, maxval 65535); values scaled so the map maximum is
/// white, negatives clipped to black, an all-nonpositive map is all black.
std::string pgm16(const IndexMap& map);
void write_pgm16(const IndexMap& map, const std::filesystem::path& path);

/// "row,col,value" lines under a header.
std::string index_map_csv(const IndexMap& map);

}  // namespace mdim::nn
