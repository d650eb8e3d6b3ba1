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

#include "mdim/theory.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "mdim/error.hpp"
#include "mdim/summation.hpp"

namespace mdim {

namespace {

void check_profiles(std::span<const MomentProfile> factors) {
  if (factors.empty()) throw ContractError("need at least one factor");
  for (const auto& p : factors) {
    if (!(p.sigma2 >= 0.0) || !std::isfinite(p.mu4)) {
      throw ContractError("factor moments out of domain");
    }
    if (p.sigma2 > 0.0 && p.kappa < -2.0 - 1e-9) throw ContractError("kurtosis below -2");
  }
}

std::vector<MomentProfile> apply_order(std::span<const MomentProfile> factors,
                                       std::span<const std::size_t> ordering) {
  if (ordering.empty()) return {factors.begin(), factors.end()};
  if (ordering.size() != factors.size()) throw ContractError("ordering length != d");
  std::vector<bool> seen(factors.size(), false);
  std::vector<MomentProfile> out;
  out.reserve(factors.size());
  for (std::size_t j : ordering) {
    if (j >= factors.size() || seen[j]) throw ContractError("ordering is not a permutation");
    seen[j] = true;
    out.push_back(factors[j]);
  }
  return out;
}

// prefix[i] = prod_{t < i} q_t, suffix[i] = prod_{t >= i} q_t
struct Products {
  explicit Products(const std::vector<double>& q) : prefix(q.size() + 1, 1.0), suffix(q.size() + 1, 1.0) {
    for (std::size_t i = 0; i < q.size(); ++i) prefix[i + 1] = prefix[i] * q[i];
    for (std::size_t i = q.size(); i-- > 0;) suffix[i] = suffix[i + 1] * q[i];
  }
  double except(std::size_t j) const { return prefix[j] * suffix[j + 1]; }
  double outside(std::size_t j, std::size_t k) const { return prefix[j] * suffix[k + 1]; }
  std::vector<double> prefix;
  std::vector<double> suffix;
};

// Pair sums use the between-product built incrementally over k.
template <typename Term>
double pair_sum(std::size_t d, const std::vector<double>& q_between_a,
                const std::vector<double>& q_between_b, Term&& term) {
  CompensatedSum sum;
  for (std::size_t j = 0; j < d; ++j) {
    double between_a = 1.0;
    double between_b = 1.0;
    for (std::size_t k = j + 1; k < d; ++k) {
      sum.add(term(j, k, between_a, between_b));
      between_a *= q_between_a[k];
      between_b *= q_between_b[k];
    }
  }
  return sum.value();
}

}  // namespace

DifferenceMoments difference_moments(double sigma2, double kappa) {
  if (!(sigma2 >= 0.0) || !(kappa >= -2.0)) throw ContractError("difference_moments: sigma2 < 0 or kappa < -2");
  const double s4 = sigma2 * sigma2;
  return {(12.0 + 2.0 * kappa) * s4, (8.0 + 2.0 * kappa) * s4, 4.0 * s4, (6.0 + kappa) * s4};
}

double var_additive(Strategy strategy, std::span<const MomentProfile> factors, std::size_t n) {
  check_profiles(factors);
  if (n < 1) throw ContractError("N must be >= 1");
  const double nn = static_cast<double>(n);
  CompensatedSum base;      // sum_j (2 + kappa_j/2) s_j^4
  CompensatedSum lag;       // sum_j (kappa_j + 2) s_j^4
  for (const auto& p : factors) {
    const double s4 = p.sigma2 * p.sigma2;
    const double c4 = p.central4();
    base.add(0.5 * (s4 + c4));
    lag.add(c4 - s4);
  }
  double v = base.value() / nn;
  if (strategy == Strategy::WindingFull) v += (nn - 1.0) / (2.0 * nn * nn) * lag.value();
  return v;
}

double var_product(Strategy strategy, std::span<const MomentProfile> factors, std::size_t n,
                   std::span<const std::size_t> ordering) {
  check_profiles(factors);
  if (n < 1) throw ContractError("N must be >= 1");
  const bool winding = strategy == Strategy::WindingFull || strategy == Strategy::WindingTruncated;
  const std::vector<MomentProfile> p =
      winding ? apply_order(factors, ordering) : std::vector<MomentProfile>(factors.begin(), factors.end());
  const std::size_t d = p.size();
  const double nn = static_cast<double>(n);

  std::vector<double> m4(d);
  std::vector<double> m2sq(d);
  for (std::size_t t = 0; t < d; ++t) {
    m4[t] = p[t].mu4;
    m2sq[t] = p[t].mu2 * p[t].mu2;
  }
  const Products prod4(m4);
  const Products prod2(m2sq);

  // Diagonal terms: Var(Delta_j^2)/4 = s^4 ((3 + k/2) prod mu4 - prod mu2^2).
  CompensatedSum diagonal;
  for (std::size_t j = 0; j < d; ++j) {
    const double s4 = p[j].sigma2 * p[j].sigma2;
    diagonal.add(0.5 * (3.0 * s4 + p[j].central4()) * prod4.except(j) - s4 * prod2.except(j));
  }
  double v = diagonal.value() / nn;
  if (strategy == Strategy::Naive) return v;

  // E(Delta_j^2) E(Delta_k^2) / 4 for j < k.
  auto mean_term = [&](std::size_t j, std::size_t k, double between_m2sq) {
    return p[j].sigma2 * p[k].sigma2 * p[j].mu2 * p[k].mu2 * prod2.outside(j, k) * between_m2sq;
  };

  if (strategy == Strategy::Radial) {
    // Both differences share the base point: every other factor enters as mu4.
    const double cov = pair_sum(d, m4, m2sq, [&](std::size_t j, std::size_t k, double b4, double b2) {
      return 0.25 * p[j].eta * p[k].eta * prod4.outside(j, k) * b4 - mean_term(j, k, b2);
    });
    return v + 2.0 / nn * cov;
  }

  // Same block (d+j, d+k): factors between j and k differ, the rest shared.
  const double within = pair_sum(d, m4, m2sq, [&](std::size_t j, std::size_t k, double, double b2) {
    return 0.25 * p[j].eta * p[k].eta * prod4.outside(j, k) * b2 - mean_term(j, k, b2);
  });
  v += 2.0 / nn * within;
  if (strategy == Strategy::WindingTruncated) return v;

  // Adjacent blocks (2d+j, d+k): only the factors between j and k are shared;
  // N - 1 such pairs per (j, k).
  const double across = pair_sum(d, m4, m2sq, [&](std::size_t j, std::size_t k, double b4, double b2) {
    return 0.25 * p[j].eta * p[k].eta * prod2.outside(j, k) * b4 - mean_term(j, k, b2);
  });
  // Same variable one block apart (d+j, 2d+j) share only z_{d+j}.
  CompensatedSum lag;
  for (std::size_t j = 0; j < d; ++j) {
    const double s4 = p[j].sigma2 * p[j].sigma2;
    lag.add((p[j].central4() - s4) * prod2.except(j));
  }
  v += 2.0 * (nn - 1.0) / (nn * nn) * across;
  v += (nn - 1.0) / (2.0 * nn * nn) * lag.value();
  return v;
}

double nu_product(std::span<const MomentProfile> factors) {
  check_profiles(factors);
  CompensatedSum numerator;
  double ratio_product = 1.0;
  for (const auto& p : factors) {
    const double second = p.mu * p.mu + p.sigma2;
    if (!(second > 0.0)) {
      throw DegenerateVarianceError("nu_product: a factor is identically zero");
    }
    numerator.add(p.sigma2 / second);
    ratio_product *= p.mu * p.mu / second;
  }
  const double denominator = 1.0 - ratio_product;
  if (!(denominator > 0.0) || numerator.value() <= 0.0) {
    throw DegenerateVarianceError("nu_product: every factor is constant");
  }
  return numerator.value() / denominator;
}

std::vector<bool> covariance_sign_condition(std::span<const MomentProfile> factors) {
  std::vector<bool> out;
  out.reserve(factors.size());
  for (const auto& p : factors) out.push_back(p.kappa >= -5.0 / 16.0);
  return out;
}

WindingLagStructure::WindingLagStructure(std::size_t d) : d_(d) {
  if (d < 1) throw ContractError("winding lag structure needs d >= 1");
}

bool WindingLagStructure::may_covary(std::int64_t i, std::int64_t i_prime) const {
  return std::llabs(i - i_prime) <= static_cast<std::int64_t>(d_);
}

WindingLagStructure::LagClass WindingLagStructure::lag_class(std::int64_t i,
                                                             std::int64_t i_prime) const {
  if (i < 1 || i_prime < 1) throw ContractError("winding steps are 1-based");
  const auto d = static_cast<std::int64_t>(d_);
  return {static_cast<std::size_t>((i - 1) % d + 1), i_prime - i};
}

std::vector<WindingLagStructure::LagClass> WindingLagStructure::classes() const {
  std::vector<LagClass> out;
  const auto d = static_cast<std::int64_t>(d_);
  for (std::size_t v = 1; v <= d_; ++v) {
    for (std::int64_t lag = -d; lag <= d; ++lag) out.push_back({v, lag});
  }
  return out;
}

std::vector<WindingLagStructure::StepPair> WindingLagStructure::pair_terms(std::size_t j,
                                                                           std::size_t k) const {
  if (!(1 <= j && j < k && k <= d_)) throw ContractError("pair_terms needs 1 <= j < k <= d");
  const auto d = static_cast<std::int64_t>(d_);
  const auto jj = static_cast<std::int64_t>(j);
  const auto kk = static_cast<std::int64_t>(k);
  return {{d + jj, d + kk, false}, {2 * d + jj, d + kk, true}};
}

std::vector<std::vector<bool>> WindingLagStructure::mask(std::size_t steps) const {
  std::vector<std::vector<bool>> m(steps, std::vector<bool>(steps));
  for (std::size_t a = 0; a < steps; ++a) {
    for (std::size_t b = 0; b < steps; ++b) {
      m[a][b] = may_covary(static_cast<std::int64_t>(a) + 1, static_cast<std::int64_t>(b) + 1);
    }
  }
  return m;
}

WindingLagStructure winding_lag_covariance_structure(std::size_t d) {
  return WindingLagStructure(d);
}

}  // namespace mdim
