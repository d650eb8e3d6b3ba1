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

#include "mdim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdim/error.hpp"

namespace mdim {

namespace {

constexpr double kProbTolerance = 1e-12;

void check_probs(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw ContractError(std::string(what) + ": no probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ContractError(std::string(what) + ": negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw ContractError(std::string(what) + ": probabilities sum to " + std::to_string(total));
  }
}

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  cdf.back() = 1.0;
  return cdf;
}

// First bin whose cumulative probability exceeds u, skipping empty bins.
std::size_t draw_bin(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double Histogram::level(std::size_t b) const {
  if (b == 0) return edges.front();
  if (b + 1 == bins()) return edges.back();
  return 0.5 * (edges[b] + edges[b + 1]);
}

CoordinateDistribution::CoordinateDistribution(Kind kind) : kind_(std::move(kind)) {
  if (auto* h = std::get_if<Histogram>(&kind_)) {
    if (h->edges.size() != h->probs.size() + 1) {
      throw ContractError("histogram: need bins + 1 edges");
    }
    check_probs(h->probs, "histogram");
    for (std::size_t i = 1; i < h->edges.size(); ++i) {
      if (!(h->edges[i] > h->edges[i - 1])) {
        throw ContractError("histogram: edges must be strictly increasing");
      }
    }
    cdf_ = cumulative(h->probs);
  } else if (auto* f = std::get_if<FiniteSupport>(&kind_)) {
    if (f->values.size() != f->probs.size()) {
      throw ContractError("finite support: values and probs differ in length");
    }
    check_probs(f->probs, "finite support");
    cdf_ = cumulative(f->probs);
  }
}

CoordinateDistribution CoordinateDistribution::histogram(std::vector<double> edges,
                                                         std::vector<double> probs,
                                                         HistogramMode mode) {
  return CoordinateDistribution(Histogram{std::move(edges), std::move(probs), mode});
}

CoordinateDistribution CoordinateDistribution::finite(std::vector<double> values,
                                                      std::vector<double> probs) {
  return CoordinateDistribution(FiniteSupport{std::move(values), std::move(probs)});
}

double CoordinateDistribution::sample(RandomStream& stream) const {
  return std::visit(
      Overloaded{
          [&](const Uniform01&) { return stream.uniform(); },
          [&](const Bernoulli01&) { return static_cast<double>(stream.next_u64() >> 63); },
          [&](const StdGaussian&) { return stream.normal(); },
          [&](const Histogram& h) {
            const std::size_t b = draw_bin(cdf_, stream.uniform());
            if (h.mode == HistogramMode::Atoms) return h.level(b);
            const double lo = h.edges[b];
            const double hi = h.edges[b + 1];
            return lo + (hi - lo) * stream.uniform();
          },
          [&](const FiniteSupport& f) { return f.values[draw_bin(cdf_, stream.uniform())]; },
      },
      kind_);
}

namespace {

// Raw moments E X and E X^2.
std::pair<double, double> first_two_moments(const CoordinateDistribution::Kind& kind) {
  return std::visit(
      Overloaded{
          [](const Uniform01&) { return std::pair{0.5, 1.0 / 3.0}; },
          [](const Bernoulli01&) { return std::pair{0.5, 0.5}; },
          [](const StdGaussian&) { return std::pair{0.0, 1.0}; },
          [](const Histogram& h) {
            double m1 = 0.0;
            double m2 = 0.0;
            for (std::size_t b = 0; b < h.bins(); ++b) {
              if (h.mode == HistogramMode::Atoms) {
                const double v = h.level(b);
                m1 += h.probs[b] * v;
                m2 += h.probs[b] * v * v;
              } else {
                const double lo = h.edges[b];
                const double hi = h.edges[b + 1];
                m1 += h.probs[b] * 0.5 * (lo + hi);
                m2 += h.probs[b] * (lo * lo + lo * hi + hi * hi) / 3.0;
              }
            }
            return std::pair{m1, m2};
          },
          [](const FiniteSupport& f) {
            double m1 = 0.0;
            double m2 = 0.0;
            for (std::size_t a = 0; a < f.values.size(); ++a) {
              m1 += f.probs[a] * f.values[a];
              m2 += f.probs[a] * f.values[a] * f.values[a];
            }
            return std::pair{m1, m2};
          },
      },
      kind);
}

}  // namespace

double CoordinateDistribution::mean() const { return first_two_moments(kind_).first; }

double CoordinateDistribution::variance() const {
  const auto [m1, m2] = first_two_moments(kind_);
  return std::max(0.0, m2 - m1 * m1);
}

bool CoordinateDistribution::is_finite() const {
  if (std::holds_alternative<Bernoulli01>(kind_) || std::holds_alternative<FiniteSupport>(kind_)) {
    return true;
  }
  const auto* h = std::get_if<Histogram>(&kind_);
  return h != nullptr && h->mode == HistogramMode::Atoms;
}

FiniteSupport CoordinateDistribution::atoms() const {
  FiniteSupport out;
  auto push = [&](double v, double p) {
    if (p > 0.0) {
      out.values.push_back(v);
      out.probs.push_back(p);
    }
  };
  if (std::holds_alternative<Bernoulli01>(kind_)) {
    push(0.0, 0.5);
    push(1.0, 0.5);
  } else if (const auto* f = std::get_if<FiniteSupport>(&kind_)) {
    for (std::size_t a = 0; a < f->values.size(); ++a) push(f->values[a], f->probs[a]);
  } else if (const auto* h = std::get_if<Histogram>(&kind_);
             h != nullptr && h->mode == HistogramMode::Atoms) {
    for (std::size_t b = 0; b < h->bins(); ++b) push(h->level(b), h->probs[b]);
  } else {
    throw ContractError("atoms(): " + name() + " is not a finite distribution");
  }
  return out;
}

std::string CoordinateDistribution::name() const {
  return std::visit(Overloaded{
                        [](const Uniform01&) { return std::string("uniform01"); },
                        [](const Bernoulli01&) { return std::string("bernoulli01"); },
                        [](const StdGaussian&) { return std::string("std_gaussian"); },
                        [](const Histogram&) { return std::string("histogram"); },
                        [](const FiniteSupport&) { return std::string("finite"); },
                    },
                    kind_);
}

InputModel::InputModel(std::vector<CoordinateDistribution> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw ContractError("input model needs d >= 1 coordinates");
}

InputModel::InputModel(std::size_t d, const CoordinateDistribution& coord)
    : InputModel(std::vector<CoordinateDistribution>(d, coord)) {}

void sample_point_into(const InputModel& model, RandomStream& stream, std::span<double> out) {
  if (out.size() != model.dims()) throw ContractError("sample_point: output length != d");
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.coord(j).sample(stream);
}

Point sample_point(const InputModel& model, RandomStream& stream) {
  Point x(model.dims());
  sample_point_into(model, stream, x);
  return x;
}

Point hybrid(std::span<const double> x, std::span<const double> z, std::size_t j) {
  if (x.size() != z.size()) throw ContractError("hybrid: x and z differ in length");
  if (j >= x.size()) {
    throw ContractError("hybrid: variable index " + std::to_string(j) + " out of range");
  }
  Point y(x.begin(), x.end());
  y[j] = z[j];
  return y;
}

std::int64_t winding_index(std::int64_t i, std::int64_t j, std::int64_t d) {
  if (d < 1 || j < 1 || j > d || i < 0) throw ContractError("winding_index: bad arguments");
  const std::int64_t diff = i - j;
  // floor division for possibly negative diff
  std::int64_t q = diff / d;
  if (diff % d != 0 && diff < 0) --q;
  return d * q + j;
}

}  // namespace mdim
