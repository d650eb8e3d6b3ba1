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

#include <cmath>
#include <limits>

#include "json.hpp"
#include "mdim/error.hpp"
#include "mdim/records.hpp"

namespace mdim {
namespace {

DeltaEstimate sample_estimate() {
  DeltaEstimate e;
  e.strategy = Strategy::Radial;
  e.n = 64;
  e.d = 3;
  e.seed = 11;
  e.replicate = 2;
  e.tau_total = {0.1, 1.0 / 3.0, 2e-17};
  e.delta_hat = 0.1 + 1.0 / 3.0 + 2e-17;
  e.sigma2_hat = 0.25;
  e.nu_hat = e.delta_hat / 0.25;
  e.n_evals = 256;
  return e;
}

TEST(Records, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Records, CsvEscape) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(split_csv_line("x,\"a,b\",\"q\"\"q\",")[1], "a,b");
  EXPECT_EQ(split_csv_line("x,\"a,b\",\"q\"\"q\",")[2], "q\"q");
  EXPECT_EQ(split_csv_line("x,\"a,b\",\"q\"\"q\",").size(), 4u);
}

TEST(Records, CsvSchema) {
  const auto header = split_csv_line(estimate_csv_header());
  const std::vector<std::string> expect{"strategy", "N",      "R",         "d",        "output",
                                        "seed",     "replicate", "delta_hat", "sigma2_hat", "nu_hat",
                                        "n_evals",  "sigma2_source", "tau_total"};
  EXPECT_EQ(header, expect);
  std::string row = estimate_csv_row(sample_estimate(), 5);
  ASSERT_EQ(row.back(), '\n');
  row.pop_back();
  const auto fields = split_csv_line(row);
  ASSERT_EQ(fields.size(), expect.size());
  EXPECT_EQ(fields[0], "radial");
  EXPECT_EQ(fields[2], "5");
  EXPECT_EQ(std::stod(fields[9]), *sample_estimate().nu_hat);
  EXPECT_EQ(split_csv_line(fields[12]).size(), 1u);
}

TEST(Records, JsonRoundTrip) {
  const DeltaEstimate e = sample_estimate();
  const DeltaEstimate back = parse_estimate_json(estimate_json(e));
  EXPECT_EQ(back.strategy, e.strategy);
  EXPECT_EQ(back.tau_total, e.tau_total);
  EXPECT_EQ(back.delta_hat, e.delta_hat);
  EXPECT_EQ(back.nu_hat, e.nu_hat);
  EXPECT_EQ(back.n_evals, e.n_evals);
  DeltaEstimate flat = e;
  flat.sigma2_hat = 0.0;
  flat.nu_hat.reset();
  const auto j = nlohmann::json::parse(estimate_json(flat));
  EXPECT_TRUE(j["nu_hat"].is_null());
  EXPECT_FALSE(parse_estimate_json(estimate_json(flat)).nu_hat.has_value());
}

TEST(Records, JsonErrors) {
  EXPECT_THROW(parse_estimate_json("{"), FormatError);
  auto j = nlohmann::json::parse(estimate_json(sample_estimate()));
  j["tau_total"].push_back(1.0);
  EXPECT_THROW(parse_estimate_json(j.dump()), FormatError);
  j = nlohmann::json::parse(estimate_json(sample_estimate()));
  j["sigma2_source"] = "elsewhere";
  EXPECT_THROW(parse_estimate_json(j.dump()), FormatError);
}

}  // namespace
}  // namespace mdim
