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

#include <atomic>
#include <cmath>

#include "helpers.hpp"
#include "mdim/error.hpp"
#include "mdim/estimators.hpp"
#include "mdim/summation.hpp"
#include "mdim/testfns.hpp"

namespace mdim {
namespace {

BlackBox sum_box(std::size_t d) {
  return BlackBox::scalar(d, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  });
}

BlackBox product_box(std::size_t d) {
  return BlackBox::scalar(d, [](std::span<const double> x) {
    double s = 1.0;
    for (double v : x) s *= v;
    return s;
  });
}

EstimatorConfig config(Strategy s, std::size_t n, std::uint64_t seed = 1) {
  EstimatorConfig c;
  c.strategy = s;
  c.n = n;
  c.seed = seed;
  return c;
}

TEST(Estimators, EvaluationCountContract) {
  for (std::size_t d : {1u, 3u, 7u}) {
    for (Strategy s : kAllStrategies) {
      auto calls = std::make_shared<std::atomic<std::size_t>>(0);
      BlackBox f = BlackBox::scalar(d, [calls](std::span<const double> x) {
        ++*calls;
        return x[0];
      });
      const std::size_t n = 300;
      const auto e = estimate_delta(f, InputModel(d, CoordinateDistribution::uniform01()), config(s, n));
      EXPECT_EQ(calls->load(), evaluation_count(s, n, d)) << to_string(s) << " d=" << d;
      EXPECT_EQ(e.n_evals, evaluation_count(s, n, d));
    }
  }
  EXPECT_EQ(evaluation_count(Strategy::Naive, 10, 4), 80u);
  EXPECT_EQ(evaluation_count(Strategy::Radial, 10, 4), 50u);
  EXPECT_EQ(evaluation_count(Strategy::WindingFull, 10, 4), 41u);
  EXPECT_EQ(evaluation_count(Strategy::WindingTruncated, 10, 4), 50u);
  EXPECT_THROW(evaluation_count(Strategy::Naive, std::size_t{1} << 62, 8), ContractError);
}

TEST(Estimators, DeltaIsCompensatedSumOfTau) {
  const auto tf = make_sobol_g({0.0, 1.0, 4.5, 9.0});
  for (Strategy s : kAllStrategies) {
    const auto e = estimate_delta(tf.box, tf.model, config(s, 5000));
    CompensatedSum sum;
    for (double t : e.tau_total) {
      EXPECT_GE(t, 0.0);
      sum.add(t);
    }
    EXPECT_EQ(e.delta_hat, sum.value());
    ASSERT_TRUE(e.nu_hat.has_value());
    EXPECT_EQ(*e.nu_hat, e.delta_hat / e.sigma2_hat);
  }
}

TEST(Estimators, AdditiveUniformNuNearOne) {
  const InputModel model(3, CoordinateDistribution::uniform01());
  for (Strategy s : kAllStrategies) {
    const auto e = estimate_delta(sum_box(3), model, config(s, 100000));
    EXPECT_NEAR(*e.nu_hat, 1.0, 0.02) << to_string(s);
  }
}

TEST(Estimators, GaussianProductNuNearD) {
  const InputModel model(3, CoordinateDistribution::std_gaussian());
  for (Strategy s : kAllStrategies) {
    const auto e = estimate_delta(product_box(3), model, config(s, 1000000));
    EXPECT_NEAR(*e.nu_hat, 3.0, 0.06) << to_string(s);
  }
}

TEST(Estimators, TwoNormOneDimensionJustBelowOne) {
  const auto tf = make_two_norm(1);
  const auto e = estimate_delta(tf.box, tf.model, config(Strategy::Naive, 1000000, 2));
  // nu is exactly 1 at d = 1; the window around 0.9983 also contains 1.
  EXPECT_NEAR(*e.nu_hat, 0.9983, 0.005);
}

TEST(Estimators, TotalIndexPairs) {
  RandomStream s(4, StreamId::compose(0, 0, 99));
  const InputModel u1(1, CoordinateDistribution::uniform01());
  EXPECT_NEAR(estimate_total_index_pairs(sum_box(1), u1, 0, 100000, s), 1.0 / 12.0, 0.002);

  const BlackBox constant = BlackBox::scalar(2, [](std::span<const double>) { return 3.5; });
  EXPECT_EQ(estimate_total_index_pairs(constant, InputModel(2, CoordinateDistribution::uniform01()), 1, 1000, s),
            0.0);

  // f = x1 x2 on {0,1}^2: terms are 0.5 * Bernoulli(1/4).
  const double est = estimate_total_index_pairs(product_box(2), InputModel(2, CoordinateDistribution::bernoulli01()),
                                                1, 100000, s);
  EXPECT_NEAR(est, 0.125, 3 * std::sqrt(0.25 * 0.25 * 0.75 / 100000));
}

TEST(Estimators, LowerIndex) {
  const InputModel u2(2, CoordinateDistribution::uniform01());
  const BlackBox first = BlackBox::scalar(2, [](std::span<const double> x) { return x[0]; });
  std::vector<double> reps;
  for (std::uint64_t r = 0; r < 20; ++r) {
    RandomStream s(5, StreamId::compose(r, 0, 98));
    reps.push_back(estimate_lower_index(first, u2, 0, 20000, s));
  }
  auto m = test::mean_se(reps);
  EXPECT_NEAR(m.mean, 1.0 / 12.0, 4 * m.se);

  RandomStream s(5, StreamId::compose(0, 0, 97));
  const BlackBox constant = BlackBox::scalar(2, [](std::span<const double>) { return -2.0; });
  EXPECT_EQ(estimate_lower_index(constant, u2, 1, 1000, s), 0.0);

  const BlackBox inter =
      BlackBox::scalar(2, [](std::span<const double> x) { return (2 * x[0] - 1) * (2 * x[1] - 1); });
  const InputModel b2(2, CoordinateDistribution::bernoulli01());
  reps.clear();
  for (std::uint64_t r = 0; r < 20; ++r) {
    RandomStream rs(6, StreamId::compose(r, 0, 96));
    reps.push_back(estimate_lower_index(inter, b2, 0, 5000, rs));
  }
  m = test::mean_se(reps);
  EXPECT_NEAR(m.mean, 0.0, 3 * m.se);
}

TEST(Estimators, LowerIndicesAllVariables) {
  // f = 2 x1 + x2 + x1 x3 on U(0,1)^3: main effect of x1 is (2 + 1/2)^2 / 12.
  const BlackBox f = BlackBox::scalar(
      3, [](std::span<const double> x) { return 2 * x[0] + x[1] + x[0] * x[2]; });
  auto c = config(Strategy::Naive, 200000, 8);
  const auto lower = estimate_lower_indices(f, InputModel(3, CoordinateDistribution::uniform01()), c);
  ASSERT_EQ(lower.size(), 1u);
  EXPECT_NEAR(lower[0][0], 6.25 / 12.0, 0.02);
  EXPECT_NEAR(lower[0][1], 1.0 / 12.0, 0.02);
  EXPECT_NEAR(lower[0][2], 0.25 / 12.0, 0.02);
}

TEST(Estimators, Sigma2) {
  RandomStream s(8, StreamId::compose(0, 0, 95));
  const double n = 100000;
  const double v = estimate_sigma2(sum_box(1), InputModel(1, CoordinateDistribution::uniform01()), 100000, s);
  // Var of the sample variance of U(0,1): (mu4 - sigma^4 (n-3)/(n-1)) / n.
  EXPECT_NEAR(v, 1.0 / 12.0, 3 * std::sqrt((1.0 / 80.0 - 1.0 / 144.0) / n));
  const BlackBox constant = BlackBox::scalar(3, [](std::span<const double>) { return 1.25; });
  EXPECT_EQ(estimate_sigma2(constant, InputModel(3, CoordinateDistribution::std_gaussian()), 1000, s), 0.0);
  const double b = estimate_sigma2(sum_box(4), InputModel(4, CoordinateDistribution::bernoulli01()), 100000, s);
  // Sum of 4 fair coins: variance 1, fourth central moment 2.5.
  EXPECT_NEAR(b, 1.0, 3 * std::sqrt((2.5 - 1.0) / n));
  EXPECT_THROW(estimate_sigma2(constant, InputModel(3, CoordinateDistribution::std_gaussian()), 1, s),
               ContractError);
}

TEST(Estimators, MeanDimensionGuards) {
  EXPECT_DOUBLE_EQ(mean_dimension(3.0, 2.0), 1.5);
  EXPECT_THROW(mean_dimension(1.0, 0.0), DegenerateVarianceError);
  EXPECT_THROW(mean_dimension(1.0, 1e-13, 1e-12), DegenerateVarianceError);
}

TEST(Estimators, ConstantFunctionHasNoNu) {
  const BlackBox constant = BlackBox::scalar(3, [](std::span<const double>) { return 2.0; });
  for (Strategy s : kAllStrategies) {
    const auto e = estimate_delta(constant, InputModel(3, CoordinateDistribution::uniform01()), config(s, 100));
    EXPECT_EQ(e.delta_hat, 0.0);
    EXPECT_EQ(e.sigma2_hat, 0.0);
    EXPECT_FALSE(e.nu_hat.has_value());
  }
}

TEST(Estimators, DeterministicAcrossThreadCounts) {
  const auto tf = make_sobol_g({0.0, 0.5, 1.0, 3.0, 9.0});
  for (Strategy s : kAllStrategies) {
    auto c1 = config(s, 3000, 42);
    auto c4 = c1;
    c4.threads = 4;
    const auto a = estimate_delta(tf.box, tf.model, c1);
    const auto b = estimate_delta(tf.box, tf.model, c4);
    const auto again = estimate_delta(tf.box, tf.model, c1);
    EXPECT_EQ(a.delta_hat, b.delta_hat) << to_string(s);
    EXPECT_EQ(a.sigma2_hat, b.sigma2_hat);
    EXPECT_EQ(a.tau_total, b.tau_total);
    EXPECT_EQ(a.tau_total, again.tau_total);
  }
  auto r1 = config(Strategy::Radial, 200, 3);
  auto r3 = r1;
  r3.threads = 3;
  EXPECT_EQ(replicate_variance(tf.box, tf.model, r1, 16).deltas(),
            replicate_variance(tf.box, tf.model, r3, 16).deltas());
}

TEST(Estimators, SeedChangesResult) {
  const auto tf = make_sobol_g({0.0, 1.0});
  const auto a = estimate_delta(tf.box, tf.model, config(Strategy::Naive, 500, 1));
  const auto b = estimate_delta(tf.box, tf.model, config(Strategy::Naive, 500, 2));
  EXPECT_NE(a.delta_hat, b.delta_hat);
}

TEST(Estimators, ErrorsCarryContext) {
  const BlackBox bad = BlackBox::scalar(2, [](std::span<const double> x) {
    return x[0] > 0.9 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  });
  const InputModel model(2, CoordinateDistribution::uniform01());
  try {
    estimate_delta(bad, model, config(Strategy::Radial, 1000));
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    ASSERT_EQ(e.point().size(), 2u);
    EXPECT_GT(e.point()[0], 0.9);
  }
  try {
    replicate_variance(bad, model, config(Strategy::Naive, 1000), 4);
    FAIL() << "expected ReplicateError";
  } catch (const ReplicateError& e) {
    EXPECT_EQ(e.replicate(), 0u);
  }
  EXPECT_THROW(estimate_delta(sum_box(2), model, config(Strategy::Naive, 0)), ContractError);
  EXPECT_THROW(estimate_delta(sum_box(2), model, config(Strategy::WindingFull, 1)), ContractError);
  EXPECT_THROW(estimate_delta(sum_box(3), model, config(Strategy::Naive, 10)), ContractError);
  auto bad_order = config(Strategy::WindingTruncated, 10);
  bad_order.order = {0, 0};
  EXPECT_THROW(estimate_delta(sum_box(2), model, bad_order), ContractError);
}

// Product of Bernoulli factors on {0, 1}: delta = 3 * (1/4) * (1/2)^2 = 3/16.
TEST(Estimators, UnbiasedAcrossReplicates) {
  const BlackBox f = product_box(3);
  const InputModel model(3, CoordinateDistribution::bernoulli01());
  for (Strategy s : kAllStrategies) {
    const auto r = replicate_variance(f, model, config(s, 64, 17), 2000);
    EXPECT_EQ(r.replicates, 2000u);
    EXPECT_NEAR(r.mean, 3.0 / 16.0, 4 * r.standard_error()) << to_string(s);
  }
}

TEST(Estimators, PermutedOrderStillUnbiased) {
  const auto tf = make_sobol_g({0.0, 2.0, 5.0});
  auto c = config(Strategy::WindingFull, 64, 5);
  c.order = {2, 0, 1};
  const auto r = replicate_variance(tf.box, tf.model, c, 1000);
  EXPECT_NEAR(r.mean, *tf.delta, 4 * r.standard_error());
}

TEST(Estimators, NaiveVariablesUncorrelated) {
  const auto tf = make_sobol_g({0.0, 0.0, 0.0});
  const auto r = replicate_variance(tf.box, tf.model, config(Strategy::Naive, 32, 23), 2000);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = j + 1; k < 3; ++k) {
      std::vector<double> a;
      std::vector<double> b;
      for (const auto& e : r.estimates) {
        a.push_back(e.tau_total[j]);
        b.push_back(e.tau_total[k]);
      }
      const double ma = test::mean_se(a).mean;
      const double mb = test::mean_se(b).mean;
      std::vector<double> prod;
      for (std::size_t i = 0; i < a.size(); ++i) prod.push_back((a[i] - ma) * (b[i] - mb));
      const auto c = test::mean_se(prod);
      EXPECT_NEAR(c.mean, 0.0, 4 * c.se) << j << "," << k;
    }
  }
}

TEST(Estimators, ConstantReplicateVarianceIsZero) {
  const BlackBox constant = BlackBox::scalar(2, [](std::span<const double>) { return 1.0; });
  const auto r = replicate_variance(constant, InputModel(2, CoordinateDistribution::uniform01()),
                                    config(Strategy::WindingFull, 16), 10);
  EXPECT_EQ(r.variance, 0.0);
  EXPECT_THROW(replicate_variance(constant, InputModel(2, CoordinateDistribution::uniform01()),
                                  config(Strategy::Naive, 16), 1),
               ContractError);
}

TEST(Estimators, MultiOutputMatchesSelectedOutput) {
  const BlackBox f(2, 2, [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] + x[1];
    out[1] = x[0] * x[1];
  });
  const InputModel model(2, CoordinateDistribution::uniform01());
  const auto all = estimate_delta_all(f, model, config(Strategy::Radial, 1000));
  ASSERT_EQ(all.size(), 2u);
  const auto one = estimate_delta(f, model, config(Strategy::Radial, 1000), 1);
  EXPECT_EQ(all[1].delta_hat, one.delta_hat);
  EXPECT_EQ(all[1].output, 1u);
}

TEST(Estimators, StrategyNames) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_THROW(parse_strategy("sideways"), ContractError);
}

}  // namespace
}  // namespace mdim
