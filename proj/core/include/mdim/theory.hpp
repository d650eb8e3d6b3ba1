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
#include <vector>

#include "mdim/estimators.hpp"
#include "mdim/moments.hpp"

namespace mdim {

/// Fourth-moment identities for i.i.d. Y_1..Y_4 with variance sigma2 and
/// excess kurtosis kappa.
struct DifferenceMoments {
  double fourth;             ///< E (Y1 - Y2)^4         = (12 + 2k) s^4
  double var_square;         ///< Var (Y1 - Y2)^2       = (8 + 2k) s^4
  double cross_independent;  ///< E (Y1-Y2)^2 (Y3-Y4)^2 = 4 s^4
  double cross_shared;       ///< E (Y1-Y2)^2 (Y1-Y3)^2 = (6 + k) s^4
};

DifferenceMoments difference_moments(double sigma2, double kappa);

/// Exact Var(delta estimate) for f = mu + sum_j g_j(x_j).
double var_additive(Strategy strategy, std::span<const MomentProfile> factors, std::size_t n);

/// Exact Var(delta estimate) for f = prod_j g_j(x_j).
///
/// `ordering` is the winding-stairs update order (a permutation of 0..d-1,
/// empty for ascending); the winding variances depend on which factors sit
/// between and outside each pair in that order. Naive and radial ignore it.
double var_product(Strategy strategy, std::span<const MomentProfile> factors, std::size_t n,
                   std::span<const std::size_t> ordering = {});

/// Mean dimension of a product function:
/// sum_j s_j^2/(mu_j^2 + s_j^2) / (1 - prod_j mu_j^2/(mu_j^2 + s_j^2)).
double nu_product(std::span<const MomentProfile> factors);

/// Per factor: kappa_j >= -5/16. When every entry holds, radial covariances
/// are nonnegative for product functions and Var(radial) >= Var(naive).
std::vector<bool> covariance_sign_condition(std::span<const MomentProfile> factors);

/// Dependence pattern of squared differences Delta_i^2 = (f(x_i) - f(x_{i-1}))^2
/// along a deterministic winding-stairs chain in d variables (steps are 1-based).
class WindingLagStructure {
 public:
  /// Covariance class of (Delta_i^2, Delta_{i+lag}^2): by shift invariance it
  /// depends only on the variable updated at step i and on the lag.
  struct LagClass {
    std::size_t variable;  ///< 1-based position in the update order
    std::int64_t lag;
    friend bool operator==(const LagClass&, const LagClass&) = default;
  };

  /// Step pair whose covariance enters cov(tau_j, tau_k) for j < k.
  struct StepPair {
    std::int64_t first;
    std::int64_t second;
    bool cross_block;  ///< true for the (2d + j, d + k) term
  };

  explicit WindingLagStructure(std::size_t d);

  std::size_t dims() const noexcept { return d_; }

  /// Delta_i and Delta_{i'} share a z value iff |i - i'| <= d.
  bool may_covary(std::int64_t i, std::int64_t i_prime) const;

  LagClass lag_class(std::int64_t i, std::int64_t i_prime) const;

  /// Every class with a possibly nonzero covariance: d * (2d + 1) entries.
  std::vector<LagClass> classes() const;

  /// Representative step pairs for the covariance of the per-variable
  /// estimates of variables j < k (1-based): (d+j, d+k) within a block and
  /// (2d+j, d+k) across adjacent blocks.
  std::vector<StepPair> pair_terms(std::size_t j, std::size_t k) const;

  /// Dense mask over steps 1..steps: mask[a][b] = may_covary(a+1, b+1).
  std::vector<std::vector<bool>> mask(std::size_t steps) const;

 private:
  std::size_t d_;
};

WindingLagStructure winding_lag_covariance_structure(std::size_t d);

}  // namespace mdim
