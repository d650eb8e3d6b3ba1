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

#include <benchmark/benchmark.h>

#include <vector>

#include "mdim/anova.hpp"
#include "mdim/estimators.hpp"
#include "mdim/nn/histograms.hpp"
#include "mdim/nn/idx.hpp"
#include "mdim/nn/network.hpp"
#include "mdim/rng.hpp"
#include "mdim/testfns.hpp"

namespace {

using namespace mdim;

std::filesystem::path fixture(const char* name) { return std::filesystem::path(MDIM_FIXTURE_DIR) / name; }

void BM_RngU64(benchmark::State& state) {
  RandomStream s(1, StreamId::compose(0, 0, 0));
  for (auto _ : state) benchmark::DoNotOptimize(s.next_u64());
}
BENCHMARK(BM_RngU64);

void BM_RngNormal(benchmark::State& state) {
  RandomStream s(1, StreamId::compose(0, 0, 0));
  for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(BM_RngNormal);

void BM_ForwardFixture(benchmark::State& state) {
  const nn::Network net = nn::load_network(fixture("fixture.mdnn"));
  std::vector<double> x(net.input_size(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(net.logits(x));
}
BENCHMARK(BM_ForwardFixture);

void BM_Estimator(benchmark::State& state) {
  const auto strategy = static_cast<Strategy>(state.range(0));
  const auto tf = make_two_norm(8);
  EstimatorConfig c;
  c.strategy = strategy;
  c.n = 10000;
  c.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_delta(tf.box, tf.model, c));
  state.SetLabel(std::string(to_string(strategy)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(evaluation_count(strategy, c.n, 8)));
}
BENCHMARK(BM_Estimator)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_AnovaEnumerate(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  const InputModel model(d, CoordinateDistribution::finite({0.0, 1.0, 2.0, 3.0}, {0.1, 0.2, 0.3, 0.4}));
  std::size_t grid = 1;
  for (std::size_t j = 0; j < d; ++j) grid *= 4;
  std::vector<double> table(grid);
  RandomStream s(2, StreamId::compose(0, 0, 0));
  for (double& t : table) t = s.normal();
  const auto tf = make_discrete(model, table);
  for (auto _ : state) benchmark::DoNotOptimize(anova_enumerate(tf.box, tf.model));
}
BENCHMARK(BM_AnovaEnumerate)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_HistogramSampling(benchmark::State& state) {
  const auto archive = nn::read_idx(fixture("digits-images.idx3-ubyte"), fixture("digits-labels.idx1-ubyte"));
  const auto set = nn::build_histograms(archive, 256).sets.at(nn::kCombinedClass);
  const InputModel model = nn::histogram_model(set, HistogramMode::Continuous);
  RandomStream s(3, StreamId::compose(0, 0, 0));
  std::vector<double> x(model.dims());
  for (auto _ : state) {
    sample_point_into(model, s, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_HistogramSampling);

}  // namespace

BENCHMARK_MAIN();
