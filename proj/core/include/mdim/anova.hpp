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
#include <vector>

#include "mdim/black_box.hpp"
#include "mdim/sampling.hpp"

namespace mdim {

/// Subset u of 0..d-1 as a bitmask (bit j set iff variable j is in u).
using Subset = std::uint32_t;

inline constexpr std::size_t kMaxEnumerationDims = 20;
inline constexpr std::size_t kMaxEnumerationGrid = 1'000'000;

/// Exact ANOVA decomposition of f on a finite product grid.
///
/// f is expanded in a tensor basis that is orthonormal under P; the variance
/// component of u is the energy of the coefficients whose nonconstant factors
/// sit exactly on u. Effect tables are rebuilt from those coefficients.
class VarianceComponents {
 public:
  std::size_t dims() const noexcept { return atoms_.size(); }

  /// sigma^2_u for a nonempty u; component(0) is 0.
  double component(Subset u) const { return components_.at(u); }
  const std::vector<double>& components() const noexcept { return components_; }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  /// sum_u |u| sigma^2_u = sum_j (total index of j).
  double delta() const noexcept { return delta_; }
  /// delta / variance. Throws DegenerateVarianceError when variance is 0.
  double nu() const;

  /// sum over u containing j of sigma^2_u (0-based j).
  double total_index(std::size_t j) const;
  /// sum over nonempty u inside {j} (the main effect variance).
  double lower_index(std::size_t j) const;

  /// f_u evaluated on the sub-grid of the variables in u, row-major with the
  /// lowest variable index outermost.
  std::vector<double> effect_table(Subset u) const;

  /// f_u at a full grid index (one atom index per variable).
  double effect_at(Subset u, const std::vector<std::size_t>& grid_index) const;

  const std::vector<FiniteSupport>& atoms() const noexcept { return atoms_; }
  std::size_t grid_size() const noexcept { return coefficients_.size(); }

 private:
  friend VarianceComponents anova_enumerate(const BlackBox&, const InputModel&, std::size_t);

  std::vector<FiniteSupport> atoms_;
  // basis_[j][k * m_j + a] = phi_{j,k}(atom a); phi_{j,0} == 1
  std::vector<std::vector<double>> basis_;
  std::vector<double> coefficients_;  // row-major over (k_1, ..., k_d)
  std::vector<double> components_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double delta_ = 0.0;
};

/// Brute-force ANOVA of f (output `output`) over every atom combination of a
/// model whose coordinates are all finite. Requires d <= 20 and at most 10^6
/// grid points; throws ContractError otherwise.
VarianceComponents anova_enumerate(const BlackBox& f, const InputModel& model,
                                   std::size_t output = 0);

}  // namespace mdim
