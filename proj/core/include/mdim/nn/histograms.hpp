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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mdim/nn/idx.hpp"
#include "mdim/sampling.hpp"

namespace mdim::nn {

/// Class id used for the histograms pooled over all images.
inline constexpr int kCombinedClass = 10;

/// Per-pixel marginal histograms of one image class.
struct PixelHistograms {
  int class_id = kCombinedClass;
  std::size_t images = 0;  ///< number of source images
  std::vector<Histogram> pixels;
};

/// Histograms for every class plus the combined set.
struct PixelHistogramSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bins = 0;
  std::string dataset;
  std::map<int, PixelHistograms> sets;  ///< keyed by class id (kCombinedClass for all)
  std::map<int, std::string> errors;    ///< classes that could not be built
};

/// Bin edges for `bins` evenly spaced gray levels k/(bins-1) on [0, 1]: each
/// level sits in its own bin, edges halfway between neighbours.
std::vector<double> level_edges(std::size_t bins);

/// Bin of a gray value under level_edges(bins).
std::size_t level_bin(double value, std::size_t bins);

/// Builds the ten per-class sets and the combined set. Classes 0..9 with no
/// images are recorded in `errors`; the others are still built.
PixelHistogramSet build_histograms(const ImageArchive& archive, std::size_t bins);

/// Product input model that resamples each pixel from its histogram.
InputModel histogram_model(const PixelHistograms& set, HistogramMode mode);

/// MDHS file: "MDHS", i32 class id, u32 image count, u32 pixel count, then per
/// pixel u32 bin count, (bins + 1) f64 edges and bins f64 probabilities;
/// all little-endian.
void write_mdhs(const PixelHistograms& set, const std::filesystem::path& path);
PixelHistograms read_mdhs(const std::filesystem::path& path);

/// File name used for a class: "h0.mdhs" .. "h9.mdhs", "combined.mdhs".
std::string mdhs_file_name(int class_id);

}  // namespace mdim::nn
