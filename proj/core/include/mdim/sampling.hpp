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
#include <variant>
#include <vector>

#include "mdim/rng.hpp"

namespace mdim {

/// Dense real coordinates of one input point (binary pixels included).
using Point = std::vector<double>;

struct Uniform01 {};

/// Fair coin on {0, 1}.
struct Bernoulli01 {};

struct StdGaussian {};

/// How a histogram coordinate turns a sampled bin into a value.
enum class HistogramMode {
  /// Uniform point inside the sampled bin.
  Continuous,
  /// The bin's level: its lower edge for the first bin, its upper edge for
  /// the last, and its midpoint otherwise.
  Atoms,
};

/// Piecewise-constant density over strictly increasing bin edges.
struct Histogram {
  std::vector<double> edges;  ///< bins + 1 entries
  std::vector<double> probs;  ///< bins entries, summing to 1
  HistogramMode mode = HistogramMode::Continuous;

  std::size_t bins() const noexcept { return probs.size(); }
  /// Value drawn for bin b in Atoms mode.
  double level(std::size_t b) const;
};

/// Discrete distribution on explicit atoms.
struct FiniteSupport {
  std::vector<double> values;
  std::vector<double> probs;
};

/// Marginal distribution P_j of one input coordinate.
class CoordinateDistribution {
 public:
  using Kind = std::variant<Uniform01, Bernoulli01, StdGaussian, Histogram, FiniteSupport>;

  CoordinateDistribution() = default;
  /// Validates probabilities (nonnegative, sum to 1 within 1e-12) and edges.
  CoordinateDistribution(Kind kind);  // NOLINT(google-explicit-constructor)

  static CoordinateDistribution uniform01() { return {Uniform01{}}; }
  static CoordinateDistribution bernoulli01() { return {Bernoulli01{}}; }
  static CoordinateDistribution std_gaussian() { return {StdGaussian{}}; }
  static CoordinateDistribution histogram(std::vector<double> edges, std::vector<double> probs,
                                          HistogramMode mode = HistogramMode::Continuous);
  static CoordinateDistribution finite(std::vector<double> values, std::vector<double> probs);

  double sample(RandomStream& stream) const;

  double mean() const;
  double variance() const;

  /// True for distributions with finitely many atoms (Bernoulli01, FiniteSupport,
  /// and Histogram in Atoms mode).
  bool is_finite() const;
  /// Atoms with positive probability; requires is_finite().
  FiniteSupport atoms() const;

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  Kind kind_ = Uniform01{};
  std::vector<double> cdf_;  // cumulative probs for Histogram and FiniteSupport
};

/// Product measure P = P_1 x ... x P_d over independent coordinates.
class InputModel {
 public:
  explicit InputModel(std::vector<CoordinateDistribution> coords);
  InputModel(std::size_t d, const CoordinateDistribution& coord);

  std::size_t dims() const noexcept { return coords_.size(); }
  const CoordinateDistribution& coord(std::size_t j) const { return coords_.at(j); }
  const std::vector<CoordinateDistribution>& coords() const noexcept { return coords_; }

 private:
  std::vector<CoordinateDistribution> coords_;
};

/// One draw x ~ P.
Point sample_point(const InputModel& model, RandomStream& stream);
void sample_point_into(const InputModel& model, RandomStream& stream, std::span<double> out);

/// The point x_{-j}:z_j (0-based j): x with coordinate j taken from z.
Point hybrid(std::span<const double> x, std::span<const double> z, std::size_t j);

/// Step at which coordinate j (1-based) of the winding-stairs point x_i was
/// last replaced: r(i, j) = d * floor((i - j) / d) + j. Under the start
/// convention x_0 = (z_{1-d}, ..., z_0) every x_i has x_{i,j} = z_{r(i,j)}.
std::int64_t winding_index(std::int64_t i, std::int64_t j, std::int64_t d);

}  // namespace mdim
