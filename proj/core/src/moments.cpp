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

#include "mdim/moments.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "mdim/error.hpp"
#include "mdim/summation.hpp"

namespace mdim {

std::string_view to_string(MomentSource s) noexcept {
  switch (s) {
    case MomentSource::Analytic:
      return "analytic";
    case MomentSource::Quadrature:
      return "quadrature";
    case MomentSource::Sample:
      return "sample";
  }
  return "unknown";
}

MomentProfile MomentProfile::from_raw(double mu, double mu2, double mu3, double mu4,
                                      MomentSource source) {
  MomentProfile p;
  p.mu = mu;
  p.mu2 = mu2;
  p.mu3 = mu3;
  p.mu4 = mu4;
  p.source = source;
  p.sigma2 = std::max(0.0, mu2 - mu * mu);
  p.eta = mu4 - 2.0 * mu * mu3 + mu2 * mu2;
  const double m3c = mu3 - 3.0 * mu * mu2 + 2.0 * mu * mu * mu;
  const double m4c = p.central4();
  if (p.sigma2 > 0.0) {
    const double sd = std::sqrt(p.sigma2);
    p.gamma = m3c / (p.sigma2 * sd);
    p.kappa = m4c / (p.sigma2 * p.sigma2) - 3.0;
  }
  return p;
}

double MomentProfile::central4() const noexcept {
  const double m2 = mu * mu;
  return std::max(0.0, mu4 - 4.0 * mu * mu3 + 6.0 * m2 * mu2 - 3.0 * m2 * m2);
}

MomentProfile MomentProfile::gaussian(double mean, double sd) {
  const double s2 = sd * sd;
  const double m = mean;
  return from_raw(m, m * m + s2, m * m * m + 3.0 * m * s2, m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2);
}

MomentProfile MomentProfile::uniform(double lo, double hi) {
  if (!(hi > lo)) throw ContractError("uniform moments need lo < hi");
  auto raw = [&](int k) { return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo)); };
  return from_raw(raw(1), raw(2), raw(3), raw(4));
}

MomentProfile MomentProfile::two_point(double a, double b, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("two_point: p outside [0, 1]");
  auto raw = [&](int k) { return (1.0 - p) * std::pow(a, k) + p * std::pow(b, k); };
  return from_raw(raw(1), raw(2), raw(3), raw(4));
}

MomentProfile MomentProfile::constant(double c) {
  return from_raw(c, c * c, c * c * c, c * c * c * c);
}

MomentProfile MomentProfile::from_samples(std::span<const double> ys) {
  if (ys.empty()) throw ContractError("from_samples: empty sample");
  CompensatedSum s1;
  CompensatedSum s2;
  CompensatedSum s3;
  CompensatedSum s4;
  for (double y : ys) {
    const double y2 = y * y;
    s1.add(y);
    s2.add(y2);
    s3.add(y2 * y);
    s4.add(y2 * y2);
  }
  const double n = static_cast<double>(ys.size());
  return from_raw(s1.value() / n, s2.value() / n, s3.value() / n, s4.value() / n,
                  MomentSource::Sample);
}

namespace {

template <class F>
double integrate(F f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
}

}  // namespace

MomentProfile factor_moments(const std::function<double(double)>& g,
                             const CoordinateDistribution& dist) {
  double raw[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
  if (dist.is_finite()) {
    const FiniteSupport atoms = dist.atoms();
    for (int k = 1; k <= 4; ++k) {
      CompensatedSum s;
      for (std::size_t a = 0; a < atoms.values.size(); ++a) {
        s.add(atoms.probs[a] * std::pow(g(atoms.values[a]), k));
      }
      raw[k] = s.value();
    }
    return MomentProfile::from_raw(raw[1], raw[2], raw[3], raw[4], MomentSource::Analytic);
  }

  const auto& kind = dist.kind();
  for (int k = 1; k <= 4; ++k) {
    auto power = [&](double x) { return std::pow(g(x), k); };
    if (std::holds_alternative<Uniform01>(kind)) {
      // split at 1/2 so kinks of the common test factors fall on a node
      raw[k] = integrate(power, 0.0, 0.5) + integrate(power, 0.5, 1.0);
    } else if (std::holds_alternative<StdGaussian>(kind)) {
      const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      auto weighted = [&](double x) { return power(x) * inv_sqrt_2pi * std::exp(-0.5 * x * x); };
      const double inf = std::numeric_limits<double>::infinity();
      raw[k] = integrate(weighted, -inf, 0.0) + integrate(weighted, 0.0, inf);
    } else if (const auto* h = std::get_if<Histogram>(&kind)) {
      CompensatedSum s;
      for (std::size_t b = 0; b < h->bins(); ++b) {
        if (h->probs[b] == 0.0) continue;
        const double lo = h->edges[b];
        const double hi = h->edges[b + 1];
        s.add(h->probs[b] * integrate(power, lo, hi) / (hi - lo));
      }
      raw[k] = s.value();
    } else {
      throw ContractError("factor_moments: unsupported distribution");
    }
  }
  for (int k = 1; k <= 4; ++k) {
    if (!std::isfinite(raw[k])) throw ContractError("factor has non-finite moments");
  }
  return MomentProfile::from_raw(raw[1], raw[2], raw[3], raw[4], MomentSource::Quadrature);
}

}  // namespace mdim
