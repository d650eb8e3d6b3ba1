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

#include "config.hpp"

#include <algorithm>

#include "mdim/descriptors.hpp"
#include "mdim/error.hpp"
#include "mdim/nn/histograms.hpp"

namespace mdim::cli {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const auto& entry : names) {
    // accept "a,b" as well as separate entries
    std::size_t start = 0;
    while (start <= entry.size()) {
      const std::size_t comma = std::min(entry.find(',', start), entry.size());
      const std::string name = entry.substr(start, comma - start);
      if (name == "all") {
        out.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
      } else if (!name.empty()) {
        const Strategy s = parse_strategy(name);
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
      start = comma + 1;
    }
  }
  return out;
}

NetworkFunction parse_network_function(const json& j, const ExperimentConfig& c) {
  NetworkFunction nf;
  const auto path = c.resolve(j.at("path").get<std::string>());
  nf.net = std::make_shared<const nn::Network>(nn::load_network(path));
  nf.target = nn::parse_target(j.value("target", "g"));
  nf.output = j.value("output", std::size_t{0});
  if (nf.output >= nf.net->classes()) throw ConfigError("network output index out of range");
  return nf;
}

}  // namespace

std::filesystem::path ExperimentConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

Strategy ExperimentConfig::single_strategy() const {
  return strategies_given ? strategies.front() : Strategy::WindingTruncated;
}

BlackBox ExperimentConfig::box() const {
  if (testfn) return testfn->box;
  if (network) {
    return nn::network_box(network->net)
        .select(nn::output_index(network->target, network->output, network->net->classes()));
  }
  throw ConfigError("config has no function");
}

const InputModel& ExperimentConfig::input_model() const {
  if (testfn) return testfn->model;
  if (model) return *model;
  throw ConfigError("config has no input model");
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides,
                             bool needs_function) {
  ExperimentConfig c;
  c.base_dir = path.parent_path();
  try {
    c.raw = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (!c.raw.is_object()) throw ConfigError("config must be a JSON object");
  const json& j = c.raw;

  try {
    if (j.contains("function")) {
      const json& f = j.at("function");
      if (f.value("kind", "") == "network") {
        c.network = parse_network_function(f, c);
        const std::size_t pixels = c.network->net->input_size();
        if (j.contains("model")) {
          c.model = parse_input_model(j.at("model").dump(), c.base_dir);
        } else {
          const HistogramMode mode =
              j.value("histogram_mode", "continuous") == "atoms" ? HistogramMode::Atoms : HistogramMode::Continuous;
          c.model = make_sampler(c, j.value("sampler", "uniform"), mode).model;
        }
        if (c.model->dims() != pixels) throw ConfigError("input model dimension does not match the network input");
      } else {
        c.testfn = parse_test_function(f.dump());
      }
    } else if (needs_function) {
      throw ConfigError("config needs a 'function' entry");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("function: ") + e.what());
  }

  std::vector<std::string> names = overrides.strategies;
  if (names.empty()) names = get_or<std::vector<std::string>>(j, "strategies", {});
  c.strategies_given = !names.empty();
  if (names.empty()) names = {"all"};
  c.strategies = parse_strategies(names);
  if (c.strategies.empty()) throw ConfigError("no strategies selected");

  c.n = overrides.n.value_or(get_or<std::size_t>(j, "N", 1000));
  c.r = overrides.r.value_or(get_or<std::size_t>(j, "R", 1));
  if (c.n < 1 || c.r < 1) throw ConfigError("N and R must be at least 1");

  if (overrides.seed) {
    c.seed = *overrides.seed;
  } else if (j.contains("seed")) {
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
  } else {
    throw ConfigError("a seed is required (config 'seed' or --seed)");
  }
  c.threads = overrides.threads.value_or(get_or<unsigned>(j, "threads", 1));
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  c.out_dir = overrides.out_dir ? std::filesystem::path(*overrides.out_dir)
                                : c.resolve(get_or<std::string>(j, "out_dir", "."));
  c.variance_floor = get_or<double>(j, "variance_floor", 1e-12);
  if (!(c.variance_floor >= 0.0)) throw ConfigError("variance_floor must be >= 0");
  c.order = get_or<std::vector<std::size_t>>(j, "order", {});
  return c;
}

nn::Sampler make_sampler(const ExperimentConfig& config, const std::string& name, HistogramMode mode) {
  std::size_t pixels = 784;
  if (config.network) pixels = config.network->net->input_size();
  if (name == "uniform") return nn::uniform_sampler(pixels);
  if (name == "binary") return nn::binary_sampler(pixels);
  int cls = -1;
  if (name == "combined") {
    cls = nn::kCombinedClass;
  } else if (name.size() == 2 && name[0] == 'h' && name[1] >= '0' && name[1] <= '9') {
    cls = name[1] - '0';
  } else {
    throw ConfigError("unknown sampler '" + name + "' (uniform, binary, combined, h0..h9)");
  }
  if (!config.raw.contains("histograms")) throw ConfigError("sampler '" + name + "' needs a 'histograms' directory");
  const auto dir = config.resolve(config.raw.at("histograms").get<std::string>());
  auto sampler = nn::histogram_sampler(nn::read_mdhs(dir / nn::mdhs_file_name(cls)), mode);
  if (sampler.model.dims() != pixels) throw ConfigError("histogram pixel count does not match the network input");
  return sampler;
}

}  // namespace mdim::cli
