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

#include <functional>
#include <span>
#include <string_view>

#include "mdim/sampling.hpp"

namespace mdim {

/// How a MomentProfile was obtained.
enum class MomentSource { Analytic, Quadrature, Sample };

std::string_view to_string(MomentSource s) noexcept;

/// Moments of one factor Y = g_j(x_j) of an additive or product function.
struct MomentProfile {
  double mu = 0.0;      ///< E Y
  double sigma2 = 0.0;  ///< Var Y
  double gamma = 0.0;   ///< skewness (0 when sigma2 == 0)
  double kappa = 0.0;   ///< excess kurtosis (0 when sigma2 == 0)
  double mu2 = 0.0;     ///< E Y^2
  double mu3 = 0.0;     ///< E Y^3
  double mu4 = 0.0;     ///< E Y^4
  double eta = 0.0;     ///< E(Y^2 (Y - Y')^2) = mu4 - 2 mu mu3 + mu2^2
  MomentSource source = MomentSource::Analytic;

  /// Builds every field from the raw moments E Y^k, k = 1..4.
  static MomentProfile from_raw(double mu, double mu2, double mu3, double mu4,
                                MomentSource source = MomentSource::Analytic);

  /// Y = mean + sd * Z with Z standard normal.
  static MomentProfile gaussian(double mean = 0.0, double sd = 1.0);
  /// Y ~ U(lo, hi).
  static MomentProfile uniform(double lo = 0.0, double hi = 1.0);
  /// Y = b with probability p, a otherwise.
  static MomentProfile two_point(double a, double b, double p);
  static MomentProfile constant(double c);
  /// Plug-in moments of a sample (biased, as raw sample averages).
  static MomentProfile from_samples(std::span<const double> ys);

  /// E(Y - mu)^4.
  double central4() const noexcept;
};

/// Moments of g(x) for x ~ dist: exact sums for finite distributions,
/// adaptive Gauss-Kronrod quadrature otherwise.
MomentProfile factor_moments(const std::function<double(double)>& g,
                             const CoordinateDistribution& dist);

}  // namespace mdim
