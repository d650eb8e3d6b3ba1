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

#include "mdim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mdim/error.hpp"
#include "mdim/parallel.hpp"
#include "mdim/summation.hpp"

namespace mdim {

namespace {

constexpr std::size_t kChunk = 256;

std::uint64_t role_of(Strategy s) { return static_cast<std::uint64_t>(s) + 1; }
constexpr std::uint64_t kRoleLower = 17;

std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw ContractError("N * d overflows the evaluation count");
  return r;
}

std::size_t checked_add(std::size_t a, std::size_t b) {
  std::size_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw ContractError("N * d overflows the evaluation count");
  return r;
}

// Evaluates f into a reusable buffer and rejects non-finite outputs.
class Evaluator {
 public:
  explicit Evaluator(const BlackBox& f) : f_(f), out_(f.outputs()) {}

  std::span<const double> operator()(std::span<const double> x) {
    f_.evaluate(x, out_);
    for (double v : out_) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "black box";
        if (!f_.name().empty()) msg << " '" << f_.name() << "'";
        msg << " returned a non-finite value";
        throw EvaluationError(msg.str(), std::vector<double>(x.begin(), x.end()));
      }
    }
    return out_;
  }

 private:
  const BlackBox& f_;
  std::vector<double> out_;
};

// Per-chunk accumulators: squared differences per (output, variable) and
// running moments of the evaluations feeding sigma2.
struct Accumulator {
  Accumulator(std::size_t outputs, std::size_t d) : d(d), sq(outputs * d), moments(outputs) {}

  void add_square(std::span<const double> a, std::span<const double> b, std::size_t j) {
    for (std::size_t o = 0; o < a.size(); ++o) {
      const double diff = a[o] - b[o];
      sq[o * d + j].add(diff * diff);
    }
  }

  void add_value(std::span<const double> v) {
    for (std::size_t o = 0; o < v.size(); ++o) moments[o].add(v[o]);
  }

  void merge(const Accumulator& other) {
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k].merge(other.sq[k]);
    for (std::size_t o = 0; o < moments.size(); ++o) moments[o].merge(other.moments[o]);
  }

  std::size_t d;
  std::vector<CompensatedSum> sq;
  std::vector<RunningMoments> moments;
};

std::vector<std::size_t> resolve_order(const std::vector<std::size_t>& order, std::size_t d) {
  if (order.empty()) {
    std::vector<std::size_t> identity(d);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    return identity;
  }
  if (order.size() != d) throw ContractError("winding order must list every variable once");
  std::vector<bool> seen(d, false);
  for (std::size_t j : order) {
    if (j >= d || seen[j]) throw ContractError("winding order is not a permutation of 0..d-1");
    seen[j] = true;
  }
  return order;
}

void check_inputs(const BlackBox& f, const InputModel& model, std::size_t n) {
  if (f.dims() != model.dims()) throw ContractError("black box and input model differ in d");
  if (n < 1) throw ContractError("N must be >= 1");
}

// Runs body(chunk, first, last, acc) over chunks of sample indices and reduces
// the accumulators in chunk order.
template <typename Body>
Accumulator run_chunks(std::size_t n, std::size_t outputs, std::size_t d, unsigned threads,
                       Body&& body) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Accumulator> parts(chunks, Accumulator(outputs, d));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t first = c * kChunk;
    const std::size_t last = std::min(n, first + kChunk);
    body(c, first, last, parts[c]);
  });
  Accumulator total(outputs, d);
  for (const auto& p : parts) total.merge(p);
  return total;
}

Accumulator run_naive(const BlackBox& f, const InputModel& model, const EstimatorConfig& cfg) {
  const std::size_t d = model.dims();
  return run_chunks(cfg.n, f.outputs(), d, cfg.threads,
                    [&](std::size_t c, std::size_t first, std::size_t last, Accumulator& acc) {
                      RandomStream stream(cfg.seed,
                                          StreamId::compose(cfg.replicate, c, role_of(cfg.strategy)));
                      Evaluator eval(f);
                      Point x(d);
                      std::vector<double> base(f.outputs());
                      for (std::size_t i = first; i < last; ++i) {
                        for (std::size_t j = 0; j < d; ++j) {
                          sample_point_into(model, stream, x);
                          const double z = model.coord(j).sample(stream);
                          auto fx = eval(x);
                          std::copy(fx.begin(), fx.end(), base.begin());
                          acc.add_value(base);
                          x[j] = z;
                          auto fy = eval(x);
                          acc.add_value(fy);
                          acc.add_square(base, fy, j);
                        }
                      }
                    });
}

Accumulator run_radial(const BlackBox& f, const InputModel& model, const EstimatorConfig& cfg) {
  const std::size_t d = model.dims();
  return run_chunks(cfg.n, f.outputs(), d, cfg.threads,
                    [&](std::size_t c, std::size_t first, std::size_t last, Accumulator& acc) {
                      RandomStream stream(cfg.seed,
                                          StreamId::compose(cfg.replicate, c, role_of(cfg.strategy)));
                      Evaluator eval(f);
                      Point x(d);
                      Point z(d);
                      std::vector<double> base(f.outputs());
                      for (std::size_t i = first; i < last; ++i) {
                        sample_point_into(model, stream, x);
                        sample_point_into(model, stream, z);
                        auto fx = eval(x);
                        std::copy(fx.begin(), fx.end(), base.begin());
                        acc.add_value(base);
                        for (std::size_t j = 0; j < d; ++j) {
                          const double keep = x[j];
                          x[j] = z[j];
                          acc.add_square(base, eval(x), j);
                          x[j] = keep;
                        }
                      }
                    });
}

Accumulator run_truncated(const BlackBox& f, const InputModel& model, const EstimatorConfig& cfg,
                          const std::vector<std::size_t>& order) {
  const std::size_t d = model.dims();
  return run_chunks(cfg.n, f.outputs(), d, cfg.threads,
                    [&](std::size_t c, std::size_t first, std::size_t last, Accumulator& acc) {
                      RandomStream stream(cfg.seed,
                                          StreamId::compose(cfg.replicate, c, role_of(cfg.strategy)));
                      Evaluator eval(f);
                      Point x(d);
                      Point z(d);
                      std::vector<double> prev(f.outputs());
                      for (std::size_t i = first; i < last; ++i) {
                        sample_point_into(model, stream, x);
                        sample_point_into(model, stream, z);
                        auto f0 = eval(x);
                        std::copy(f0.begin(), f0.end(), prev.begin());
                        acc.add_value(prev);
                        for (std::size_t j : order) {
                          x[j] = z[j];
                          auto fx = eval(x);
                          acc.add_value(fx);
                          acc.add_square(prev, fx, j);
                          std::copy(fx.begin(), fx.end(), prev.begin());
                        }
                      }
                    });
}

Accumulator run_full(const BlackBox& f, const InputModel& model, const EstimatorConfig& cfg,
                     const std::vector<std::size_t>& order) {
  const std::size_t d = model.dims();
  Accumulator acc(f.outputs(), d);
  RandomStream stream(cfg.seed, StreamId::compose(cfg.replicate, 0, role_of(cfg.strategy)));
  Evaluator eval(f);
  // x_0 = (z_{1-d}, ..., z_0): every coordinate an independent draw.
  Point x = sample_point(model, stream);
  std::vector<double> prev(f.outputs());
  auto f0 = eval(x);
  std::copy(f0.begin(), f0.end(), prev.begin());
  acc.add_value(prev);
  const std::size_t steps = cfg.n * d;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t j = order[s % d];
    x[j] = model.coord(j).sample(stream);
    auto fx = eval(x);
    acc.add_value(fx);
    acc.add_square(prev, fx, j);
    std::copy(fx.begin(), fx.end(), prev.begin());
  }
  return acc;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Naive:
      return "naive";
    case Strategy::Radial:
      return "radial";
    case Strategy::WindingFull:
      return "winding_full";
    case Strategy::WindingTruncated:
      return "winding_truncated";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  if (name == "winding" || name == "truncated") return Strategy::WindingTruncated;
  if (name == "full") return Strategy::WindingFull;
  throw ContractError("unknown strategy '" + std::string(name) + "'");
}

std::string_view sigma2_source(Strategy s) noexcept {
  switch (s) {
    case Strategy::Naive:
      return "all_evaluations";
    case Strategy::Radial:
      return "baseline_points";
    case Strategy::WindingFull:
    case Strategy::WindingTruncated:
      return "all_chain_evaluations";
  }
  return "unknown";
}

std::size_t evaluation_count(Strategy s, std::size_t n, std::size_t d) {
  switch (s) {
    case Strategy::Naive:
      return checked_mul(2, checked_mul(n, d));
    case Strategy::Radial:
    case Strategy::WindingTruncated:
      return checked_mul(n, checked_add(d, 1));
    case Strategy::WindingFull:
      return checked_add(checked_mul(n, d), 1);
  }
  return 0;
}

std::vector<DeltaEstimate> estimate_delta_all(const BlackBox& f, const InputModel& model,
                                              const EstimatorConfig& config) {
  check_inputs(f, model, config.n);
  if (config.strategy == Strategy::WindingFull && config.n < 2) {
    throw ContractError("winding_full needs N >= 2");
  }
  const std::size_t d = model.dims();
  const std::size_t n_evals = evaluation_count(config.strategy, config.n, d);
  const auto order = resolve_order(config.order, d);

  Accumulator acc = [&] {
    switch (config.strategy) {
      case Strategy::Naive:
        return run_naive(f, model, config);
      case Strategy::Radial:
        return run_radial(f, model, config);
      case Strategy::WindingTruncated:
        return run_truncated(f, model, config, order);
      case Strategy::WindingFull:
        break;
    }
    return run_full(f, model, config, order);
  }();

  std::vector<DeltaEstimate> result(f.outputs());
  const double two_n = 2.0 * static_cast<double>(config.n);
  for (std::size_t o = 0; o < f.outputs(); ++o) {
    DeltaEstimate& e = result[o];
    e.strategy = config.strategy;
    e.n = config.n;
    e.d = d;
    e.seed = config.seed;
    e.replicate = config.replicate;
    e.output = o;
    e.n_evals = n_evals;
    e.tau_total.resize(d);
    CompensatedSum delta;
    for (std::size_t j = 0; j < d; ++j) {
      e.tau_total[j] = acc.sq[o * d + j].value() / two_n;
      delta.add(e.tau_total[j]);
    }
    e.delta_hat = delta.value();
    e.sigma2_hat = acc.moments[o].variance();
    if (e.sigma2_hat > 0.0) e.nu_hat = e.delta_hat / e.sigma2_hat;
  }
  return result;
}

DeltaEstimate estimate_delta(const BlackBox& f, const InputModel& model,
                             const EstimatorConfig& config, std::size_t output) {
  if (output >= f.outputs()) throw ContractError("output index out of range");
  auto all = estimate_delta_all(f, model, config);
  return std::move(all[output]);
}

double estimate_total_index_pairs(const BlackBox& f, const InputModel& model, std::size_t j,
                                  std::size_t n, RandomStream& stream, std::size_t output) {
  check_inputs(f, model, n);
  if (j >= model.dims()) throw ContractError("variable index out of range");
  if (output >= f.outputs()) throw ContractError("output index out of range");
  Evaluator eval(f);
  Point x(model.dims());
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    sample_point_into(model, stream, x);
    const double z = model.coord(j).sample(stream);
    const double fx = eval(x)[output];
    x[j] = z;
    const double diff = fx - eval(x)[output];
    sum.add(diff * diff);
  }
  return sum.value() / (2.0 * static_cast<double>(n));
}

double estimate_lower_index(const BlackBox& f, const InputModel& model, std::size_t j,
                            std::size_t n, RandomStream& stream, std::size_t output) {
  check_inputs(f, model, n);
  if (j >= model.dims()) throw ContractError("variable index out of range");
  if (output >= f.outputs()) throw ContractError("output index out of range");
  Evaluator eval(f);
  Point x(model.dims());
  Point z(model.dims());
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    sample_point_into(model, stream, x);
    sample_point_into(model, stream, z);
    const double fx = eval(x)[output];
    const double fz = eval(z)[output];
    z[j] = x[j];
    const double fy = eval(z)[output];
    sum.add(fx * (fy - fz));
  }
  return sum.value() / static_cast<double>(n);
}

std::vector<std::vector<double>> estimate_lower_indices(const BlackBox& f,
                                                        const InputModel& model,
                                                        const EstimatorConfig& config) {
  check_inputs(f, model, config.n);
  const std::size_t d = model.dims();
  const std::size_t m = f.outputs();
  const std::size_t chunks = (config.n + kChunk - 1) / kChunk;
  std::vector<std::vector<CompensatedSum>> parts(chunks, std::vector<CompensatedSum>(m * d));
  parallel_for(chunks, config.threads, [&](std::size_t c) {
    RandomStream stream(config.seed, StreamId::compose(config.replicate, c, kRoleLower));
    Evaluator eval(f);
    Point x(d);
    Point z(d);
    std::vector<double> fx(m);
    std::vector<double> fz(m);
    auto& sums = parts[c];
    const std::size_t last = std::min(config.n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < last; ++i) {
      sample_point_into(model, stream, x);
      sample_point_into(model, stream, z);
      auto a = eval(x);
      std::copy(a.begin(), a.end(), fx.begin());
      auto b = eval(z);
      std::copy(b.begin(), b.end(), fz.begin());
      for (std::size_t j = 0; j < d; ++j) {
        const double keep = z[j];
        z[j] = x[j];
        auto fy = eval(z);
        for (std::size_t o = 0; o < m; ++o) sums[o * d + j].add(fx[o] * (fy[o] - fz[o]));
        z[j] = keep;
      }
    }
  });
  std::vector<std::vector<double>> result(m, std::vector<double>(d));
  for (std::size_t o = 0; o < m; ++o) {
    for (std::size_t j = 0; j < d; ++j) {
      CompensatedSum total;
      for (const auto& p : parts) total.merge(p[o * d + j]);
      result[o][j] = total.value() / static_cast<double>(config.n);
    }
  }
  return result;
}

double estimate_sigma2(const BlackBox& f, const InputModel& model, std::size_t n,
                       RandomStream& stream, std::size_t output) {
  check_inputs(f, model, n);
  if (n < 2) throw ContractError("estimate_sigma2 needs N >= 2");
  if (output >= f.outputs()) throw ContractError("output index out of range");
  Evaluator eval(f);
  Point x(model.dims());
  RunningMoments moments;
  for (std::size_t i = 0; i < n; ++i) {
    sample_point_into(model, stream, x);
    moments.add(eval(x)[output]);
  }
  return moments.variance();
}

double mean_dimension(double delta, double sigma2, double floor) {
  if (!(sigma2 > floor)) {
    throw DegenerateVarianceError("variance " + std::to_string(sigma2) +
                                  " is at or below the floor; mean dimension undefined");
  }
  return delta / sigma2;
}

std::vector<double> ReplicateSummary::deltas() const {
  std::vector<double> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(e.delta_hat);
  return out;
}

double ReplicateSummary::standard_error() const {
  return replicates == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(replicates));
}

std::vector<ReplicateSummary> replicate_variance_all(const BlackBox& f, const InputModel& model,
                                                     const EstimatorConfig& config,
                                                     std::size_t replicates) {
  if (replicates < 2) throw ContractError("replicate_variance needs R >= 2");
  check_inputs(f, model, config.n);
  std::vector<std::vector<DeltaEstimate>> runs(replicates);
  parallel_for(replicates, config.threads, [&](std::size_t r) {
    EstimatorConfig one = config;
    one.replicate = r;
    one.threads = 1;
    try {
      runs[r] = estimate_delta_all(f, model, one);
    } catch (const EvaluationError& e) {
      throw ReplicateError(r, e);
    }
  });

  std::vector<ReplicateSummary> out(f.outputs());
  for (std::size_t o = 0; o < f.outputs(); ++o) {
    ReplicateSummary& s = out[o];
    s.strategy = config.strategy;
    s.n = config.n;
    s.replicates = replicates;
    s.estimates.reserve(replicates);
    CompensatedSum sum;
    for (auto& run : runs) {
      s.estimates.push_back(run[o]);
      sum.add(run[o].delta_hat);
    }
    s.mean = sum.value() / static_cast<double>(replicates);
    CompensatedSum ss;
    for (const auto& e : s.estimates) ss.add((e.delta_hat - s.mean) * (e.delta_hat - s.mean));
    s.variance = ss.value() / static_cast<double>(replicates - 1);
  }
  return out;
}

ReplicateSummary replicate_variance(const BlackBox& f, const InputModel& model,
                                    const EstimatorConfig& config, std::size_t replicates,
                                    std::size_t output) {
  if (output >= f.outputs()) throw ContractError("output index out of range");
  auto all = replicate_variance_all(f, model, config, replicates);
  return std::move(all[output]);
}

}  // namespace mdim
