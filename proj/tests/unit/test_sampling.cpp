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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "mdim/error.hpp"
#include "mdim/rng.hpp"
#include "mdim/sampling.hpp"
#include "mdim/summation.hpp"

namespace mdim {
namespace {

TEST(RandomStream, SameSeedAndIdReproduce) {
  RandomStream a(7, StreamId::compose(1, 2, 3));
  RandomStream b(7, StreamId::compose(1, 2, 3));
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.position(), 1000u);
}

TEST(RandomStream, DistinctStreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t r = 0; r < 10; ++r) {
    for (std::uint64_t u = 0; u < 10; ++u) {
      for (std::uint64_t role = 0; role < 10; ++role) {
        RandomStream s(1, StreamId::compose(r, u, role));
        firsts.insert(s.next_u64());
      }
    }
  }
  EXPECT_EQ(firsts.size(), 1000u);
  RandomStream s1(1, StreamId::compose(0, 0, 0));
  RandomStream s2(2, StreamId::compose(0, 0, 0));
  EXPECT_NE(s1.next_u64(), s2.next_u64());
}

TEST(RandomStream, UniformAndNormalMoments) {
  RandomStream s(3, StreamId::compose(0, 0, 0));
  const int n = 200000;
  std::vector<double> u(n);
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) {
    u[i] = s.uniform();
    ASSERT_GE(u[i], 0.0);
    ASSERT_LT(u[i], 1.0);
    const double o = s.uniform_open();
    ASSERT_GT(o, 0.0);
    ASSERT_LT(o, 1.0);
    z[i] = s.normal();
  }
  const auto mu = test::mean_se(u);
  EXPECT_NEAR(mu.mean, 0.5, 4 * mu.se);
  const auto mz = test::mean_se(z);
  EXPECT_NEAR(mz.mean, 0.0, 4 * mz.se);
  std::vector<double> z2(n);
  std::transform(z.begin(), z.end(), z2.begin(), [](double v) { return v * v; });
  const auto mz2 = test::mean_se(z2);
  EXPECT_NEAR(mz2.mean, 1.0, 4 * mz2.se);
}

TEST(Summation, CompensatedBeatsNaive) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0 + 1e-13);
  RunningMoments a;
  RunningMoments b;
  RunningMoments all;
  for (int i = 0; i < 10; ++i) {
    (i < 4 ? a : b).add(i * 0.5);
    all.add(i * 0.5);
  }
  a.merge(b);
  EXPECT_NEAR(a.mean(), all.mean(), 1e-15);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-14);
}

TEST(Hybrid, Examples) {
  EXPECT_EQ(hybrid(Point{1, 2, 3}, Point{9, 9, 9}, 1), (Point{1, 9, 3}));
  EXPECT_EQ(hybrid(Point{4, 5}, Point{4, 5}, 0), (Point{4, 5}));
  EXPECT_EQ(hybrid(Point{0, 0, 0, 0}, Point{1, 1, 1, 1}, 3), (Point{0, 0, 0, 1}));
  EXPECT_THROW(hybrid(Point{1, 2}, Point{1, 2}, 2), ContractError);
  EXPECT_THROW(hybrid(Point{1, 2}, Point{1}, 0), ContractError);
}

TEST(Hybrid, IdempotentAndLocal) {
  const Point x{0.1, 0.2, 0.3};
  const Point z{0.7, 0.8, 0.9};
  for (std::size_t j = 0; j < 3; ++j) {
    const Point y = hybrid(x, z, j);
    EXPECT_EQ(hybrid(y, z, j), y);
    for (std::size_t k = 0; k < 3; ++k) {
      if (k != j) EXPECT_EQ(y[k], x[k]);
    }
  }
}

TEST(WindingIndex, Examples) {
  EXPECT_EQ(winding_index(3, 1, 3), 1);
  EXPECT_EQ(winding_index(3, 2, 3), 2);
  EXPECT_EQ(winding_index(3, 3, 3), 3);
  EXPECT_EQ(winding_index(4, 1, 3), 4);
  EXPECT_EQ(winding_index(4, 2, 3), 2);
  EXPECT_EQ(winding_index(4, 3, 3), 3);
  EXPECT_EQ(winding_index(0, 2, 2), 0);
  EXPECT_EQ(winding_index(0, 1, 2), -1);
}

TEST(WindingIndex, PointsDApartShareNothing) {
  for (std::int64_t d = 1; d <= 10; ++d) {
    for (std::int64_t i = 0; i <= 100; ++i) {
      for (std::int64_t k = d; k <= 2 * d; ++k) {
        std::set<std::int64_t> a;
        for (std::int64_t j = 1; j <= d; ++j) a.insert(winding_index(i, j, d));
        for (std::int64_t j = 1; j <= d; ++j) ASSERT_FALSE(a.count(winding_index(i + k, j, d)));
      }
    }
  }
}

TEST(CoordinateDistribution, RejectsBadProbabilities) {
  EXPECT_THROW(CoordinateDistribution::finite({0, 1}, {0.5, 0.6}), ContractError);
  EXPECT_THROW(CoordinateDistribution::finite({0, 1}, {1.5, -0.5}), ContractError);
  EXPECT_THROW(CoordinateDistribution::histogram({0, 1}, {0.5, 0.5}), ContractError);
  EXPECT_THROW(CoordinateDistribution::histogram({0, 0.5, 0.4}, {0.5, 0.5}), ContractError);
}

TEST(CoordinateDistribution, MomentsOfPresets) {
  EXPECT_DOUBLE_EQ(CoordinateDistribution::uniform01().variance(), 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(CoordinateDistribution::bernoulli01().mean(), 0.5);
  EXPECT_DOUBLE_EQ(CoordinateDistribution::std_gaussian().variance(), 1.0);
  const auto h = CoordinateDistribution::histogram({0, 0.25, 1}, {0.5, 0.5});
  EXPECT_NEAR(h.mean(), 0.5 * 0.125 + 0.5 * 0.625, 1e-15);
  EXPECT_FALSE(h.is_finite());
  const auto a = CoordinateDistribution::histogram({0, 0.25, 0.75, 1}, {0.2, 0.3, 0.5}, HistogramMode::Atoms);
  ASSERT_TRUE(a.is_finite());
  EXPECT_EQ(a.atoms().values, (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(CoordinateDistribution, HistogramBinFrequencies) {
  const std::vector<double> probs{0.1, 0.0, 0.25, 0.4, 0.25};
  const auto h = CoordinateDistribution::histogram({0, 0.1, 0.3, 0.5, 0.9, 1.0}, probs);
  const auto& edges = std::get<Histogram>(h.kind()).edges;
  RandomStream s(5, StreamId::compose(0, 0, 0));
  const int n = 1000000;
  std::vector<int> counts(probs.size(), 0);
  for (int i = 0; i < n; ++i) {
    const double v = h.sample(s);
    const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
    ASSERT_LT(b, probs.size());
    ++counts[b];
  }
  for (std::size_t b = 0; b < probs.size(); ++b) {
    const double se = std::sqrt(probs[b] * (1 - probs[b]) / n);
    EXPECT_NEAR(counts[b] / double(n), probs[b], 4 * se + 1e-12) << "bin " << b;
  }
}

TEST(CoordinateDistribution, FiniteDrawsAtomsOnly) {
  const auto f = CoordinateDistribution::finite({-1, 2, 5}, {0.2, 0.3, 0.5});
  RandomStream s(9, StreamId::compose(0, 0, 0));
  std::vector<double> xs(100000);
  for (double& x : xs) {
    x = f.sample(s);
    ASSERT_TRUE(x == -1 || x == 2 || x == 5);
  }
  const auto m = test::mean_se(xs);
  EXPECT_NEAR(m.mean, f.mean(), 4 * m.se);
}

TEST(InputModel, SamplePointsReproduce) {
  const InputModel model({CoordinateDistribution::uniform01(), CoordinateDistribution::std_gaussian(),
                          CoordinateDistribution::bernoulli01()});
  RandomStream a(1, StreamId::compose(2, 3, 4));
  RandomStream b(1, StreamId::compose(2, 3, 4));
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_point(model, a), sample_point(model, b));
}

}  // namespace
}  // namespace mdim
