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

#include "mdim/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include "json.hpp"

#include "mdim/anova.hpp"
#include "mdim/error.hpp"
#include "mdim/theory.hpp"

namespace mdim {

namespace {

using nlohmann::json;

json coord_json(const CoordinateDistribution& dist) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Uniform01>) {
          return {{"kind", "uniform01"}};
        } else if constexpr (std::is_same_v<K, Bernoulli01>) {
          return {{"kind", "bernoulli01"}};
        } else if constexpr (std::is_same_v<K, StdGaussian>) {
          return {{"kind", "std_gaussian"}};
        } else if constexpr (std::is_same_v<K, Histogram>) {
          return {{"kind", "histogram"},
                  {"edges", k.edges},
                  {"probs", k.probs},
                  {"mode", k.mode == HistogramMode::Atoms ? "atoms" : "continuous"}};
        } else {
          return {{"kind", "finite"}, {"values", k.values}, {"probs", k.probs}};
        }
      },
      dist.kind());
}

json label_json(const Factor& f) {
  json parsed = json::parse(f.label, nullptr, false);
  if (parsed.is_discarded()) parsed = f.label;
  return parsed;
}

json model_json(const InputModel& model) {
  json coords = json::array();
  for (const auto& c : model.coords()) coords.push_back(coord_json(c));
  return {{"d", model.dims()}, {"coords", coords}};
}

// Moments of the coordinate itself.
MomentProfile identity_moments(const CoordinateDistribution& dist) {
  const auto& kind = dist.kind();
  if (std::holds_alternative<Uniform01>(kind)) return MomentProfile::uniform(0.0, 1.0);
  if (std::holds_alternative<StdGaussian>(kind)) return MomentProfile::gaussian(0.0, 1.0);
  if (std::holds_alternative<Bernoulli01>(kind)) return MomentProfile::two_point(0.0, 1.0, 0.5);
  return factor_moments([](double x) { return x; }, dist);
}

// Raw moments of shift + scale * X from those of X.
MomentProfile affine_moments(const MomentProfile& x, double shift, double scale) {
  const double r[5] = {1.0, x.mu, x.mu2, x.mu3, x.mu4};
  double out[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
  const double binom[5][5] = {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  for (int k = 1; k <= 4; ++k) {
    for (int i = 0; i <= k; ++i) {
      out[k] += binom[k][i] * std::pow(shift, k - i) * std::pow(scale, i) * r[i];
    }
  }
  return MomentProfile::from_raw(out[1], out[2], out[3], out[4], x.source);
}

MomentProfile centered(const MomentProfile& p) {
  const double m3c = p.mu3 - 3.0 * p.mu * p.mu2 + 2.0 * p.mu * p.mu * p.mu;
  return MomentProfile::from_raw(0.0, p.sigma2, m3c, p.central4(), p.source);
}

void check_finite(const MomentProfile& p, std::size_t j) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma2) || !std::isfinite(p.mu4)) {
    throw ContractError("factor " + std::to_string(j) + " has non-finite moments");
  }
}

}  // namespace

Factor Factor::identity(CoordinateDistribution dist) {
  Factor f{dist, [](double x) { return x; }, identity_moments(dist), {}};
  f.label = json{{"dist", coord_json(dist)}, {"g", {{"kind", "identity"}}}}.dump();
  return f;
}

Factor Factor::affine(CoordinateDistribution dist, double shift, double scale) {
  Factor f{dist, [shift, scale](double x) { return shift + scale * x; },
           affine_moments(identity_moments(dist), shift, scale), {}};
  f.label = json{{"dist", coord_json(dist)},
                 {"g", {{"kind", "affine"}, {"shift", shift}, {"scale", scale}}}}
                .dump();
  return f;
}

Factor Factor::sobol_g(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw ContractError("sobol_g needs a >= 0");
  // |4x - 2| is U(0, 2) under U(0, 1), so E(t + a)^k has a closed form.
  double raw[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 4; ++k) {
    raw[k] = (std::pow(2.0 + a, k + 1) - std::pow(a, k + 1)) / (2.0 * (k + 1)) / std::pow(1.0 + a, k);
  }
  Factor f{CoordinateDistribution::uniform01(),
           [a](double x) { return (std::abs(4.0 * x - 2.0) + a) / (1.0 + a); },
           MomentProfile::from_raw(raw[1], raw[2], raw[3], raw[4]), {}};
  f.label = json{{"dist", {{"kind", "uniform01"}}}, {"g", {{"kind", "sobol_g"}, {"a", a}}}}.dump();
  return f;
}

Factor Factor::constant(double c, CoordinateDistribution dist) {
  Factor f{dist, [c](double) { return c; }, MomentProfile::constant(c), {}};
  f.label = json{{"dist", coord_json(dist)}, {"g", {{"kind", "constant"}, {"c", c}}}}.dump();
  return f;
}

MomentProfile Factor::profile() const {
  if (moments) return *moments;
  if (!g) throw ContractError("factor has no function");
  return factor_moments(g, dist);
}

TestFunction make_additive(double mu, std::vector<Factor> factors) {
  if (factors.empty()) throw ContractError("make_additive needs at least one factor");
  if (!std::isfinite(mu)) throw ContractError("make_additive: mu is not finite");
  const std::size_t d = factors.size();
  std::vector<CoordinateDistribution> coords;
  std::vector<std::function<double(double)>> gs;
  std::vector<double> means;
  std::vector<MomentProfile> profiles;
  json labels = json::array();
  double sigma2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const MomentProfile p = factors[j].profile();
    check_finite(p, j);
    coords.push_back(factors[j].dist);
    gs.push_back(factors[j].g);
    means.push_back(p.mu);
    profiles.push_back(centered(p));
    sigma2 += p.sigma2;
    labels.push_back(label_json(factors[j]));
  }
  auto fn = [gs, means, mu](std::span<const double> x) {
    double s = mu;
    for (std::size_t j = 0; j < gs.size(); ++j) s += gs[j](x[j]) - means[j];
    return s;
  };
  TestFunction tf{"additive",
                  json{{"kind", "additive"}, {"mu", mu}, {"factors", labels}}.dump(),
                  BlackBox::scalar(d, fn, "additive"),
                  InputModel(std::move(coords)),
                  Structure::Additive,
                  std::move(profiles),
                  sigma2,
                  sigma2,
                  std::nullopt};
  if (sigma2 > 0.0) tf.nu = 1.0;
  return tf;
}

TestFunction make_product(std::vector<Factor> factors) {
  if (factors.empty()) throw ContractError("make_product needs at least one factor");
  const std::size_t d = factors.size();
  std::vector<CoordinateDistribution> coords;
  std::vector<std::function<double(double)>> gs;
  std::vector<MomentProfile> profiles;
  json labels = json::array();
  for (std::size_t j = 0; j < d; ++j) {
    profiles.push_back(factors[j].profile());
    check_finite(profiles.back(), j);
    coords.push_back(factors[j].dist);
    gs.push_back(factors[j].g);
    labels.push_back(label_json(factors[j]));
  }
  const double nu = nu_product(profiles);  // throws when every factor is constant
  double second = 1.0;
  double mean_sq = 1.0;
  for (const auto& p : profiles) {
    second *= p.mu2;
    mean_sq *= p.mu * p.mu;
  }
  const double sigma2 = second - mean_sq;
  auto fn = [gs](std::span<const double> x) {
    double s = 1.0;
    for (std::size_t j = 0; j < gs.size(); ++j) s *= gs[j](x[j]);
    return s;
  };
  return TestFunction{"product",
                      json{{"kind", "product"}, {"factors", labels}}.dump(),
                      BlackBox::scalar(d, fn, "product"),
                      InputModel(std::move(coords)),
                      Structure::Product,
                      std::move(profiles),
                      sigma2,
                      nu * sigma2,
                      nu};
}

TestFunction make_sobol_g(std::vector<double> a) {
  if (a.empty()) throw ContractError("make_sobol_g needs d >= 1");
  std::vector<Factor> factors;
  for (double aj : a) {
    if (!(aj >= 0.0)) throw ContractError("sobol_g: negative a_j");
    factors.push_back(Factor::sobol_g(aj));
  }
  TestFunction tf = make_product(std::move(factors));
  tf.kind = "sobol_g";
  tf.descriptor = json{{"kind", "sobol_g"}, {"a", a}}.dump();
  tf.box = BlackBox::scalar(
      a.size(),
      [a](std::span<const double> x) {
        double s = 1.0;
        for (std::size_t j = 0; j < a.size(); ++j) s *= (std::abs(4.0 * x[j] - 2.0) + a[j]) / (1.0 + a[j]);
        return s;
      },
      "sobol_g");
  return tf;
}

TestFunction make_two_norm(std::size_t d) {
  if (d < 1) throw ContractError("make_two_norm needs d >= 1");
  auto fn = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };
  return TestFunction{"two_norm",
                      json{{"kind", "two_norm"}, {"d", d}}.dump(),
                      BlackBox::scalar(d, fn, "two_norm"),
                      InputModel(d, CoordinateDistribution::std_gaussian()),
                      Structure::Other,
                      {},
                      std::nullopt,
                      std::nullopt,
                      std::nullopt};
}

TestFunction make_discrete(InputModel model, std::vector<double> table) {
  const std::size_t d = model.dims();
  if (d == 0) throw ContractError("make_discrete needs d >= 1");
  std::vector<std::map<double, std::size_t>> lookup(d);
  std::vector<std::size_t> stride(d, 1);
  std::size_t grid = 1;
  for (std::size_t j = d; j-- > 0;) {
    if (!model.coord(j).is_finite()) throw ContractError("make_discrete needs finite coordinates");
    const FiniteSupport atoms = model.coord(j).atoms();
    for (std::size_t a = 0; a < atoms.values.size(); ++a) lookup[j][atoms.values[a]] = a;
    stride[j] = grid;
    grid *= atoms.values.size();
    if (grid > kMaxEnumerationGrid) throw ContractError("discrete grid exceeds 10^6 points");
  }
  if (table.size() != grid) {
    throw ContractError("discrete table has " + std::to_string(table.size()) + " entries, grid has " +
                        std::to_string(grid));
  }
  for (double v : table) {
    if (!std::isfinite(v)) throw ContractError("discrete table has a non-finite entry");
  }
  const json descriptor = {{"kind", "discrete"}, {"model", model_json(model)}, {"table", table}};
  auto fn = [lookup, stride, table](std::span<const double> x) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < lookup.size(); ++j) {
      const auto it = lookup[j].find(x[j]);
      if (it == lookup[j].end()) return std::numeric_limits<double>::quiet_NaN();
      flat += it->second * stride[j];
    }
    return table[flat];
  };
  BlackBox box = BlackBox::scalar(d, fn, "discrete");
  const VarianceComponents vc = anova_enumerate(box, model);
  TestFunction tf{"discrete",  descriptor.dump(), std::move(box), std::move(model), Structure::Other,
                  {},          vc.variance(),     vc.delta(),     std::nullopt};
  if (vc.variance() > 0.0) tf.nu = vc.nu();
  return tf;
}

}  // namespace mdim
