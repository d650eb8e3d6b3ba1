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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdim/black_box.hpp"
#include "mdim/rng.hpp"
#include "mdim/sampling.hpp"

namespace mdim {

/// Point-pairing pattern used to estimate delta = sum_j of the total indices.
enum class Strategy {
  Naive,             ///< fresh base point per variable; 2Nd evaluations
  Radial,            ///< one base point shared by all d changes; N(d+1)
  WindingFull,       ///< one Gibbs-style chain; Nd+1
  WindingTruncated,  ///< N independent chains of d+1 points; N(d+1)
};

inline constexpr Strategy kAllStrategies[] = {Strategy::Naive, Strategy::Radial,
                                              Strategy::WindingFull,
                                              Strategy::WindingTruncated};

std::string_view to_string(Strategy s) noexcept;
/// Accepts the to_string spellings ("naive", "radial", "winding_full",
/// "winding_truncated"). Throws ContractError otherwise.
Strategy parse_strategy(std::string_view name);

/// Number of function evaluations a strategy spends for (N, d).
std::size_t evaluation_count(Strategy s, std::size_t n, std::size_t d);

/// Result of one run of a delta estimator for one output.
struct DeltaEstimate {
  Strategy strategy = Strategy::Naive;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::size_t output = 0;
  std::vector<double> tau_total;  ///< per-variable Jansen estimates, all >= 0
  double delta_hat = 0.0;         ///< compensated sum of tau_total, ascending j
  double sigma2_hat = 0.0;
  std::optional<double> nu_hat;   ///< empty when sigma2_hat is zero
  std::size_t n_evals = 0;
};

/// Which evaluations feed sigma2_hat for a strategy (recorded in outputs).
std::string_view sigma2_source(Strategy s) noexcept;

struct EstimatorConfig {
  Strategy strategy = Strategy::WindingTruncated;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  /// Winding-stairs update order as a permutation of 0..d-1; empty means
  /// ascending (raster order for images).
  std::vector<std::size_t> order;
  unsigned threads = 1;
};

/// Runs one estimator and returns a DeltaEstimate per output of `f`.
std::vector<DeltaEstimate> estimate_delta_all(const BlackBox& f, const InputModel& model,
                                              const EstimatorConfig& config);

DeltaEstimate estimate_delta(const BlackBox& f, const InputModel& model,
                             const EstimatorConfig& config, std::size_t output = 0);

/// Jansen estimate (1/2N) sum_i (f(x_i) - f(x_{i,-j}:z_{i,j}))^2 of the total
/// index of variable j (0-based), drawing from `stream`.
double estimate_total_index_pairs(const BlackBox& f, const InputModel& model, std::size_t j,
                                  std::size_t n, RandomStream& stream, std::size_t output = 0);

/// (1/N) sum_i f(x_i) (f(z_{i,-j}:x_{i,j}) - f(z_i)); unbiased for the lower
/// (closed) index of variable j and may come out negative.
double estimate_lower_index(const BlackBox& f, const InputModel& model, std::size_t j,
                            std::size_t n, RandomStream& stream, std::size_t output = 0);

/// Lower indices of every variable and every output from shared base pairs
/// (x_i, z_i); N(d+2) evaluations. Result is indexed [output][variable].
std::vector<std::vector<double>> estimate_lower_indices(const BlackBox& f,
                                                        const InputModel& model,
                                                        const EstimatorConfig& config);

/// Unbiased sample variance of f over N i.i.d. draws.
double estimate_sigma2(const BlackBox& f, const InputModel& model, std::size_t n,
                       RandomStream& stream, std::size_t output = 0);

/// delta / sigma2. Throws DegenerateVarianceError when sigma2 <= floor.
double mean_dimension(double delta, double sigma2, double floor = 0.0);

struct ReplicateSummary {
  Strategy strategy = Strategy::Naive;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased, across replicates
  std::vector<DeltaEstimate> estimates;

  std::vector<double> deltas() const;
  /// Standard error of `mean`.
  double standard_error() const;
};

/// R independent estimates (replicate r uses stream ids tagged r); replicates
/// run in parallel over `config.threads`. config.replicate is ignored.
ReplicateSummary replicate_variance(const BlackBox& f, const InputModel& model,
                                    const EstimatorConfig& config, std::size_t replicates,
                                    std::size_t output = 0);

/// Same, keeping every output: result[o] summarizes output o.
std::vector<ReplicateSummary> replicate_variance_all(const BlackBox& f, const InputModel& model,
                                                     const EstimatorConfig& config,
                                                     std::size_t replicates);

}  // namespace mdim
