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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdim/estimators.hpp"
#include "mdim/nn/index_maps.hpp"
#include "mdim/nn/network.hpp"
#include "mdim/testfns.hpp"

namespace mdim::cli {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::vector<std::string> strategies;
  std::optional<std::size_t> n;
  std::optional<std::size_t> r;
};

struct NetworkFunction {
  std::shared_ptr<const nn::Network> net;
  nn::Target target = nn::Target::Logit;
  std::size_t output = 0;
};

/// A fully loaded experiment. Every referenced file has been read by the
/// time one of these exists, so commands never fail half way on a bad path.
struct ExperimentConfig {
  std::filesystem::path base_dir;
  nlohmann::json raw;

  std::optional<TestFunction> testfn;
  std::optional<NetworkFunction> network;
  std::optional<InputModel> model;  ///< input model for network functions

  std::vector<Strategy> strategies;
  bool strategies_given = false;  ///< false when the "all" default applied
  std::size_t n = 1000;
  std::size_t r = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path out_dir = ".";
  double variance_floor = 1e-12;
  std::vector<std::size_t> order;

  BlackBox box() const;
  const InputModel& input_model() const;
  std::filesystem::path resolve(const std::string& p) const;
  /// Single strategy for maps and reports: the first one given, else
  /// truncated winding stairs.
  Strategy single_strategy() const;
};

/// Thrown for anything wrong with the configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads and merges the config. `needs_function` controls whether a function
/// entry is required.
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides,
                             bool needs_function);

nn::Sampler make_sampler(const ExperimentConfig& config, const std::string& name,
                         HistogramMode mode);

}  // namespace mdim::cli
