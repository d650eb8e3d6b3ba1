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

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "mdim/error.hpp"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kEvaluationError = 3;
constexpr int kInternalError = 1;

}  // namespace

int main(int argc, char** argv) {
  using namespace mdim::cli;
  CLI::App app{"mdim: mean dimension and Sobol' index estimation"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir;
  std::size_t n = 0, r = 0;

  struct Entry {
    const char* name;
    const char* help;
    CommandOutput (*run)(const ExperimentConfig&);
    bool needs_function;
  };
  const Entry entries[] = {
      {"estimate", "Estimate delta, sigma^2 and the mean dimension", cmd_estimate, true},
      {"compare-variance", "Replicate estimators and compare their variances with the exact values",
       cmd_compare_variance, true},
      {"histograms", "Build per-pixel histogram samplers from an image archive", cmd_histograms, false},
      {"maps", "Per-pixel Sobol' index maps of a network output", cmd_maps, true},
      {"report", "Mean dimension table of a network across samplers", cmd_report, true},
      {"oracles", "Dump closed-form values for a test function", cmd_oracles, true},
  };
  std::vector<CLI::App*> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--threads", threads, "Worker threads (results do not depend on this)");
    sub->add_option("--out-dir", out_dir, "Directory for output files");
    sub->add_option("--strategy", ov.strategies, "naive, radial, winding_full, winding_truncated or all")
        ->delimiter(',');
    sub->add_option("--N", n, "Sample size");
    sub->add_option("--R", r, "Replicates");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  std::size_t which = 0;
  for (; which < subs.size(); ++which) {
    if (subs[which]->parsed()) break;
  }
  const Entry& entry = entries[which];
  CLI::App* sub = subs[which];
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--threads")) ov.threads = threads;
  if (sub->count("--out-dir")) ov.out_dir = out_dir;
  if (sub->count("--N")) ov.n = n;
  if (sub->count("--R")) ov.r = r;

  try {
    const ExperimentConfig config = load_config(config_path, ov, entry.needs_function);
    const CommandOutput output = entry.run(config);
    write_outputs(output, config.out_dir);
    for (const auto& w : output.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << output.summary;
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mdim::FormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mdim::ContractError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mdim::EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kEvaluationError;
  } catch (const mdim::DegenerateVarianceError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kEvaluationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternalError;
  }
}
