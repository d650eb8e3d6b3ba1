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

namespace mdim::nn {

/// Gray-scale images normalized to [0, 1] with integer labels.
struct ImageArchive {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;  ///< count * rows * cols, image-major
  std::vector<int> labels;
  std::string source;

  std::size_t count() const noexcept { return labels.size(); }
  std::size_t pixels_per_image() const noexcept { return rows * cols; }
};

/// IDX image (magic 0x00000803) and label (0x00000801) files, big-endian
/// headers, unsigned-byte pixels scaled by 1/255.
ImageArchive read_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// CSV fallback: one image per line, "label,p_0,...,p_{n-1}" with 0..255
/// pixel values. An optional non-numeric header line is skipped.
ImageArchive read_image_csv(const std::filesystem::path& path, std::size_t rows, std::size_t cols);

/// Writes an archive back as IDX (pixels quantized to bytes).
void write_idx(const ImageArchive& archive, const std::filesystem::path& images,
               const std::filesystem::path& labels);

}  // namespace mdim::nn
