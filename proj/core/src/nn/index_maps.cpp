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

#include "mdim/nn/index_maps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mdim/error.hpp"
#include "mdim/parallel.hpp"
#include "mdim/records.hpp"
#include "mdim/summation.hpp"

namespace mdim::nn {

namespace {

constexpr std::uint64_t kRoleMapVariance = 18;
constexpr std::size_t kChunk = 256;

// Non-owning handle so a caller's network can feed network_box.
std::shared_ptr<const Network> borrow(const Network& net) {
  return std::shared_ptr<const Network>(std::shared_ptr<const void>{}, &net);
}

void check_sampler(const Network& net, const Sampler& sampler) {
  if (sampler.model.dims() != net.input_size()) {
    throw ContractError("sampler '" + sampler.name + "' has " + std::to_string(sampler.model.dims()) +
                        " coordinates, network expects " + std::to_string(net.input_size()));
  }
}

// Unbiased variance of every output over N i.i.d. draws, chunked like the
// estimators so the thread count never changes the result.
std::vector<double> output_variances(const BlackBox& box, const InputModel& model, const IndexMapOptions& o) {
  const std::size_t m = box.outputs();
  const std::size_t chunks = (o.n + kChunk - 1) / kChunk;
  std::vector<std::vector<RunningMoments>> parts(chunks, std::vector<RunningMoments>(m));
  parallel_for(chunks, o.threads, [&](std::size_t c) {
    RandomStream stream(o.seed, StreamId::compose(0, c, kRoleMapVariance));
    Point x(model.dims());
    std::vector<double> y(m);
    const std::size_t last = std::min(o.n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < last; ++i) {
      sample_point_into(model, stream, x);
      box.evaluate(x, y);
      for (std::size_t k = 0; k < m; ++k) parts[c][k].add(y[k]);
    }
  });
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    RunningMoments total;
    for (const auto& p : parts) total.merge(p[k]);
    out[k] = total.variance();
  }
  return out;
}

}  // namespace

Sampler binary_sampler(std::size_t pixels) {
  return {"binary", InputModel(pixels, CoordinateDistribution::bernoulli01())};
}

Sampler uniform_sampler(std::size_t pixels) {
  return {"uniform", InputModel(pixels, CoordinateDistribution::uniform01())};
}

Sampler histogram_sampler(const PixelHistograms& set, HistogramMode mode) {
  const std::string name = set.class_id == kCombinedClass ? "combined" : "h" + std::to_string(set.class_id);
  return {name, histogram_model(set, mode)};
}

std::string_view to_string(IndexKind k) noexcept { return k == IndexKind::Lower ? "lower" : "total"; }

IndexKind parse_index_kind(std::string_view name) {
  if (name == "lower") return IndexKind::Lower;
  if (name == "total") return IndexKind::Total;
  throw ContractError("unknown index kind '" + std::string(name) + "' (use lower or total)");
}

std::vector<IndexMap> index_maps(const Network& net, Target target, const Sampler& sampler, IndexKind kind,
                                 const IndexMapOptions& options) {
  check_sampler(net, sampler);
  const BlackBox box = network_box(borrow(net));
  const std::size_t classes = net.classes();
  const std::size_t d = net.input_size();

  std::vector<std::vector<double>> values(classes);
  std::vector<double> sigma2(classes);
  EstimatorConfig config;
  config.strategy = options.strategy;
  config.n = options.n;
  config.seed = options.seed;
  config.threads = options.threads;
  if (kind == IndexKind::Total) {
    const auto estimates = estimate_delta_all(box, sampler.model, config);
    for (std::size_t y = 0; y < classes; ++y) {
      const auto& e = estimates[output_index(target, y, classes)];
      values[y] = e.tau_total;
      sigma2[y] = e.sigma2_hat;
    }
  } else {
    const auto lower = estimate_lower_indices(box, sampler.model, config);
    const auto var = output_variances(box, sampler.model, options);
    for (std::size_t y = 0; y < classes; ++y) {
      values[y] = lower[output_index(target, y, classes)];
      sigma2[y] = var[output_index(target, y, classes)];
    }
  }

  const Shape& in = net.input_shape();
  const bool image = in.channels == 1;
  std::vector<IndexMap> maps;
  for (std::size_t y = 0; y < classes; ++y) {
    IndexMap m;
    m.rows = image ? in.height : 1;
    m.cols = image ? in.width : d;
    m.values = std::move(values[y]);
    m.target = target;
    m.output = y;
    m.sampler = sampler.name;
    m.kind = kind;
    m.strategy = options.strategy;
    m.n = options.n;
    m.seed = options.seed;
    m.sigma2_hat = sigma2[y];
    maps.push_back(std::move(m));
  }
  return maps;
}

IndexMap index_map(const Network& net, std::size_t y, Target target, const Sampler& sampler, IndexKind kind,
                   const IndexMapOptions& options) {
  if (y >= net.classes()) throw ContractError("class " + std::to_string(y) + " out of range");
  return std::move(index_maps(net, target, sampler, kind, options)[y]);
}

std::string pgm16(const IndexMap& map) {
  if (map.values.size() != map.rows * map.cols) throw ContractError("index map size mismatch");
  std::string out = "P5\n" + std::to_string(map.cols) + " " + std::to_string(map.rows) + "\n65535\n";
  double top = 0.0;
  for (double v : map.values) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  out.reserve(out.size() + 2 * map.values.size());
  for (double v : map.values) {
    std::uint16_t level = 0;
    if (top > 0.0 && std::isfinite(v) && v > 0.0) {
      level = static_cast<std::uint16_t>(std::lround(65535.0 * std::min(1.0, v / top)));
    }
    out += static_cast<char>(level >> 8);
    out += static_cast<char>(level & 0xff);
  }
  return out;
}

void write_pgm16(const IndexMap& map, const std::filesystem::path& path) {
  const std::string bytes = pgm16(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string index_map_csv(const IndexMap& map) {
  std::string out = "row,col,value\n";
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      out += std::to_string(r) + ',' + std::to_string(c) + ',' + format_double(map.values[r * map.cols + c]) + '\n';
    }
  }
  return out;
}

}  // namespace mdim::nn
