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
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mdim/black_box.hpp"

namespace mdim::nn {

enum class Activation : std::uint32_t { Identity = 0, Relu = 1 };

/// Activation tensor shape, stored channels-last (HWC). A flattened tensor
/// has height == width == 1.
struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const noexcept { return height * width * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Weights are [out][in][kh][kw] row-major.
struct Conv2D {
  std::uint32_t out_channels = 0;
  std::uint32_t in_channels = 0;
  std::uint32_t kernel_h = 0;
  std::uint32_t kernel_w = 0;
  std::uint32_t stride = 1;
  std::uint32_t padding = 0;
  Activation activation = Activation::Identity;
  std::vector<float> weights;
  std::vector<float> bias;
};

struct MaxPool {
  std::uint32_t window = 2;
  std::uint32_t stride = 2;
};

/// HWC order, matching channels-last frameworks.
struct Flatten {};

/// Weights are [out][in] row-major.
struct Dense {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  Activation activation = Activation::Identity;
  std::vector<float> weights;
  std::vector<float> bias;
};

/// Inference is deterministic: the rate is kept for provenance only.
struct Dropout {
  float rate = 0.0f;
};

using Layer = std::variant<Conv2D, MaxPool, Flatten, Dense, Dropout>;

/// Feed-forward classifier producing pre-softmax scores g and probabilities f.
/// Immutable after construction, so forward passes may run concurrently.
class Network {
 public:
  /// Validates the layer chain; throws ShapeMismatchError on inconsistency.
  Network(Shape input, std::vector<Layer> layers);

  const Shape& input_shape() const noexcept { return input_; }
  std::size_t input_size() const noexcept { return input_.size(); }
  std::size_t classes() const noexcept { return shapes_.back().size(); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  /// Output shape of each layer.
  const std::vector<Shape>& layer_shapes() const noexcept { return shapes_; }

  struct Output {
    std::vector<double> g;  ///< pre-softmax scores
    std::vector<double> f;  ///< softmax probabilities
  };

  Output forward(std::span<const double> x) const;
  std::vector<double> logits(std::span<const double> x) const;

  /// e.g. "conv 4x3x3 -> 26x26x4 | maxpool 2 -> 13x13x4 | ...".
  std::string describe() const;

 private:
  Shape input_;
  std::vector<Layer> layers_;
  std::vector<Shape> shapes_;
  // weights and biases widened to double, one pair per layer (empty if none)
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

/// exp(g_y - max g) / sum_l exp(g_l - max g).
std::vector<double> softmax(std::span<const double> g);

inline constexpr std::uint32_t kNetworkFormatVersion = 1;

/// MDNN container: "MDNN", u32 version, u32 H, u32 W, u32 C, u32 layer count,
/// then per layer a u32 type tag (1 conv, 2 maxpool, 3 flatten, 4 dense,
/// 5 dropout) followed by its shape ints, hyperparameters and little-endian
/// float32 weights and biases.
Network parse_network(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_network(const Network& net);
Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

/// Human-readable shape summary written next to a weight file.
std::string network_sidecar_json(const Network& net);

/// Which classifier output a function reads.
enum class Target { Logit, Softmax };

std::string_view to_string(Target t) noexcept;
/// "g"/"logit" or "f"/"softmax".
Target parse_target(std::string_view name);

/// Black box with 2 * classes outputs: g_0..g_{C-1} then f_0..f_{C-1}.
BlackBox network_box(std::shared_ptr<const Network> net);

/// Index of (target, class y) among network_box outputs.
std::size_t output_index(Target target, std::size_t y, std::size_t classes);

}  // namespace mdim::nn
