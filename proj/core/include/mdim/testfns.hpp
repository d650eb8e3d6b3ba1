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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdim/black_box.hpp"
#include "mdim/moments.hpp"
#include "mdim/sampling.hpp"

namespace mdim {

/// One factor g_j(x_j) of an additive or product test function.
struct Factor {
  CoordinateDistribution dist;
  std::function<double(double)> g;
  std::optional<MomentProfile> moments;  ///< analytic moments when known
  std::string label;

  /// g(x) = x.
  static Factor identity(CoordinateDistribution dist);
  /// g(x) = shift + scale * x.
  static Factor affine(CoordinateDistribution dist, double shift, double scale);
  /// g(x) = (|4x - 2| + a) / (1 + a) on U(0, 1).
  static Factor sobol_g(double a);
  static Factor constant(double c, CoordinateDistribution dist = CoordinateDistribution::uniform01());

  /// Analytic moments if attached, numerical ones otherwise.
  MomentProfile profile() const;
};

enum class Structure { Additive, Product, Other };

/// An analytical test integrand with its natural input model and any exact
/// values known for it.
struct TestFunction {
  std::string kind;
  std::string descriptor;  ///< canonical JSON descriptor
  BlackBox box;
  InputModel model;
  Structure structure = Structure::Other;
  std::vector<MomentProfile> profiles;  ///< per-factor moments (additive/product)
  std::optional<double> sigma2;
  std::optional<double> delta;
  std::optional<double> nu;
};

/// f(x) = mu + sum_j g_j(x_j), with each g_j shifted to mean zero.
TestFunction make_additive(double mu, std::vector<Factor> factors);

/// f(x) = prod_j g_j(x_j).
TestFunction make_product(std::vector<Factor> factors);

/// Sobol' g-function prod_j (|4 x_j - 2| + a_j)/(1 + a_j) on U(0,1)^d.
TestFunction make_sobol_g(std::vector<double> a);

/// f(x) = ||x||_2 under x ~ N(0, I_d). No exact values attached.
TestFunction make_two_norm(std::size_t d);

/// Tabulated function on a finite grid: `table` is row-major over the atoms
/// of each coordinate, variable 0 outermost. Exact values via enumeration.
TestFunction make_discrete(InputModel model, std::vector<double> table);

}  // namespace mdim
