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
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "json.hpp"
#include "mdim/descriptors.hpp"
#include "mdim/nn/histograms.hpp"
#include "mdim/nn/idx.hpp"
#include "mdim/nn/network.hpp"
#include "mdim/records.hpp"

namespace mdim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MDIM_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

// Parses a CSV file and checks that every row has the header's width.
std::vector<std::vector<std::string>> checked_csv(const fs::path& p) {
  auto rows = read_csv(p);
  EXPECT_FALSE(rows.empty()) << p;
  for (const auto& r : rows) EXPECT_EQ(r.size(), rows.front().size()) << p;
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  EXPECT_NE(it, header.end()) << name;
  return static_cast<std::size_t>(it - header.begin());
}

json additive_uniform3() {
  return {{"kind", "additive"}, {"mu", 0.0}, {"d", 3}, {"factors", {{"dist", "uniform01"}, {"g", "identity"}}}};
}

json gaussian_product3() {
  return {{"kind", "product"}, {"d", 3}, {"factors", {{"dist", "std_gaussian"}, {"g", "identity"}}}};
}

TEST(Cli, EstimateAdditive) {
  const auto dir = test::scratch_dir("cli_estimate");
  const auto cfg = write_config(dir, {{"function", additive_uniform3()}, {"N", 10000}, {"seed", 5}});
  ASSERT_EQ(run_cli("estimate --config " + cfg.string() + " --out-dir " + (dir / "out").string(), dir / "log"), 0);
  const auto rows = checked_csv(dir / "out" / "estimate.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], split_csv_line(estimate_csv_header()));
  const std::size_t nu = column(rows[0], "nu_hat");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][nu]), 1.0, 0.05) << rows[i][0];
  const json doc = json::parse(read_text_file(dir / "out" / "estimate.json"));
  EXPECT_EQ(doc["records"].size(), 4u);
  for (const auto& rec : doc["records"]) EXPECT_NO_THROW(parse_estimate_json(rec.dump()));
}

TEST(Cli, EstimateGaussianProduct) {
  const auto dir = test::scratch_dir("cli_product");
  const auto cfg = write_config(dir, {{"function", gaussian_product3()}, {"N", 100000}, {"seed", 8}, {"out_dir", "out"}});
  ASSERT_EQ(run_cli("estimate --config " + cfg.string(), dir / "log"), 0);
  const auto rows = checked_csv(dir / "out" / "estimate.csv");
  const std::size_t nu = column(rows[0], "nu_hat");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][nu]), 3.0, 0.1) << rows[i][0];
}

TEST(Cli, ByteForByteReproducible) {
  const auto dir = test::scratch_dir("cli_repro");
  const auto cfg = write_config(dir, {{"function", gaussian_product3()}, {"N", 64}, {"R", 20}, {"seed", 1}});
  for (const char* sub : {"a", "b"}) {
    const std::string threads = sub[0] == 'a' ? "1" : "3";
    ASSERT_EQ(run_cli("compare-variance --config " + cfg.string() + " --threads " + threads + " --out-dir " +
                          (dir / sub).string(),
                      dir / "log"),
              0);
    ASSERT_EQ(run_cli("estimate --config " + cfg.string() + " --threads " + threads + " --out-dir " + (dir / sub).string(),
                      dir / "log"),
              0);
  }
  for (const char* f : {"estimate.csv", "estimate.json", "compare_variance.csv", "compare_variance.json"}) {
    EXPECT_EQ(read_text_file(dir / "a" / f), read_text_file(dir / "b" / f)) << f;
  }
  const auto rows = checked_csv(dir / "a" / "compare_variance.csv");
  ASSERT_EQ(rows.size(), 5u);
  const std::size_t oracle = column(rows[0], "n_var_oracle");
  EXPECT_NEAR(std::stod(rows[1][oracle]), 78.0, 1e-9);
  EXPECT_NEAR(std::stod(rows[2][oracle]), 144.0, 1e-9);
  EXPECT_EQ(rows[1][column(rows[0], "flag")], "low_R");
}

TEST(Cli, ConfigErrorsExitTwoWithoutOutput) {
  const auto dir = test::scratch_dir("cli_errors");
  json bad = {{"function", {{"kind", "network"}, {"path", "missing.mdnn"}}}, {"seed", 1}, {"out_dir", "out"}};
  EXPECT_EQ(run_cli("report --config " + write_config(dir, bad).string(), dir / "log"), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_NE(read_text_file(dir / "log").find("missing.mdnn"), std::string::npos);

  json no_seed = {{"function", additive_uniform3()}, {"out_dir", "out"}};
  EXPECT_EQ(run_cli("estimate --config " + write_config(dir, no_seed).string(), dir / "log"), 2);
  json bad_kind = {{"function", {{"kind", "spline"}}}, {"seed", 1}, {"out_dir", "out"}};
  EXPECT_EQ(run_cli("estimate --config " + write_config(dir, bad_kind).string(), dir / "log"), 2);
  json good = {{"function", additive_uniform3()}, {"seed", 1}, {"out_dir", "out"}};
  EXPECT_EQ(run_cli("estimate --config " + write_config(dir, good).string() + " --strategy bogus", dir / "log"), 2);
  EXPECT_EQ(run_cli("estimate --config " + write_config(dir, good).string() + " --N 0", dir / "log"), 2);
  EXPECT_EQ(run_cli("estimate --config " + (dir / "nope.json").string(), dir / "log"), 2);
  EXPECT_EQ(run_cli("frobnicate", dir / "log"), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, EvaluationErrorExitsThree) {
  const auto dir = test::scratch_dir("cli_eval");
  // each layer multiplies by about 1e39; nine of them overflow a double
  std::vector<nn::Layer> layers{nn::Flatten{}};
  for (int k = 0; k < 9; ++k) {
    nn::Dense d;
    d.in = 4;
    d.out = k == 8 ? 2 : 4;
    d.weights.assign(d.in * d.out, 3e38f);
    d.bias.assign(d.out, 1.0f);
    layers.emplace_back(d);
  }
  nn::save_network(nn::Network({2, 2, 1}, layers), dir / "big.mdnn");
  json cfg = {{"function", {{"kind", "network"}, {"path", "big.mdnn"}, {"target", "g"}, {"output", 1}}},
              {"N", 10},
              {"seed", 1},
              {"out_dir", "out"}};
  EXPECT_EQ(run_cli("estimate --config " + write_config(dir, cfg).string(), dir / "log"), 3);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, HistogramsHalfAndHalf) {
  const auto dir = test::scratch_dir("cli_hist");
  nn::ImageArchive a;
  a.rows = 2;
  a.cols = 2;
  a.labels = {4, 4};
  a.pixels = {0, 0, 0, 0, 1, 1, 1, 1};
  nn::write_idx(a, dir / "img", dir / "lab");
  json cfg = {{"images", "img"}, {"labels", "lab"}, {"bins", 16}, {"seed", 0}, {"out_dir", "out"}};
  ASSERT_EQ(run_cli("histograms --config " + write_config(dir, cfg).string(), dir / "log"), 0);
  for (const char* f : {"combined.mdhs", "h4.mdhs"}) {
    const auto h = nn::read_mdhs(dir / "out" / f);
    ASSERT_EQ(h.pixels.size(), 4u);
    for (const auto& p : h.pixels) {
      EXPECT_EQ(p.probs.front(), 0.5);
      EXPECT_EQ(p.probs.back(), 0.5);
    }
  }
  EXPECT_FALSE(fs::exists(dir / "out" / "h0.mdhs"));
  const json doc = json::parse(read_text_file(dir / "out" / "histograms.json"));
  EXPECT_EQ(doc["errors"].size(), 9u);
}

TEST(Cli, MapsOfConstantNetAreBlack) {
  const auto dir = test::scratch_dir("cli_maps");
  nn::Dense d;
  d.in = 784;
  d.out = 10;
  d.weights.assign(7840, 0.0f);
  d.bias.assign(10, 0.25f);
  nn::save_network(nn::Network({28, 28, 1}, {nn::Flatten{}, d}), dir / "const.mdnn");
  json cfg = {{"function", {{"kind", "network"}, {"path", "const.mdnn"}, {"target", "f"}}},
              {"sampler", "uniform"},
              {"outputs", {0, 7}},
              {"N", 8},
              {"seed", 2},
              {"out_dir", "out"}};
  ASSERT_EQ(run_cli("maps --config " + write_config(dir, cfg).string(), dir / "log"), 0);
  const std::string pgm = read_text_file(dir / "out" / "map_uniform_f7_total.pgm");
  ASSERT_EQ(pgm.size(), 15u + 2 * 784);
  EXPECT_EQ(pgm.substr(0, 15), "P5\n28 28\n65535\n");
  EXPECT_EQ(pgm.find_first_not_of('\0', 15), std::string::npos);
  const auto rows = checked_csv(dir / "out" / "map_uniform_f0_total.csv");
  EXPECT_EQ(rows.size(), 785u);
  EXPECT_FALSE(fs::exists(dir / "out" / "map_uniform_f1_total.pgm"));
}

TEST(Cli, ReportOfAdditiveNet) {
  const auto dir = test::scratch_dir("cli_report");
  nn::Dense d;
  d.in = 784;
  d.out = 10;
  d.weights.resize(7840);
  for (std::size_t i = 0; i < d.weights.size(); ++i) d.weights[i] = 0.02f * static_cast<float>(i % 5);
  d.bias.assign(10, 0.0f);
  nn::save_network(nn::Network({28, 28, 1}, {nn::Flatten{}, d}), dir / "add.mdnn");
  json cfg = {{"function", {{"kind", "network"}, {"path", "add.mdnn"}}},
              {"samplers", {"binary", "uniform"}},
              {"targets", {"g"}},
              {"strategies", {"naive"}},
              {"N", 400},
              {"seed", 4},
              {"out_dir", "out"}};
  ASSERT_EQ(run_cli("report --config " + write_config(dir, cfg).string(), dir / "log"), 0);
  const auto rows = checked_csv(dir / "out" / "report.csv");
  ASSERT_EQ(rows.size(), 21u);
  const std::size_t nu = column(rows[0], "nu_hat");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][nu]), 1.0, 0.05);
  checked_csv(dir / "out" / "report_g_wide.csv");
  EXPECT_NO_THROW(json::parse(read_text_file(dir / "out" / "report.json")));
}

TEST(Cli, Oracles) {
  const auto dir = test::scratch_dir("cli_oracles");
  json cfg = {{"function", gaussian_product3()}, {"N", 64}, {"seed", 0}, {"out_dir", "out"}};
  ASSERT_EQ(run_cli("oracles --config " + write_config(dir, cfg).string(), dir / "log"), 0);
  const json doc = json::parse(read_text_file(dir / "out" / "oracles.json"));
  EXPECT_NEAR(doc["n_var"]["naive"].get<double>(), 78.0, 1e-9);
  EXPECT_NEAR(doc["n_var"]["radial"].get<double>(), 144.0, 1e-9);
  EXPECT_NEAR(doc["n_var"]["winding_truncated"].get<double>(), 128.0, 1e-9);
  EXPECT_NEAR(doc["nu"].get<double>(), 3.0, 1e-12);
  EXPECT_EQ(doc["factors"][0]["difference_moments"]["fourth"].get<double>(), 12.0);
}

}  // namespace
}  // namespace mdim
