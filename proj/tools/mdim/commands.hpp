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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"

namespace mdim::cli {

/// Everything a command produces. Nothing touches the disk until the whole
/// command has succeeded.
struct OutputFile {
  std::string name;
  std::string contents;
  /// Writes the file itself when set; `contents` is ignored then.
  std::function<void(const std::filesystem::path&)> writer;
};

struct CommandOutput {
  std::vector<OutputFile> files;
  std::string summary;                                     ///< printed to stdout
  std::vector<std::string> warnings;                       ///< printed to stderr
};

CommandOutput cmd_estimate(const ExperimentConfig& config);
CommandOutput cmd_compare_variance(const ExperimentConfig& config);
CommandOutput cmd_histograms(const ExperimentConfig& config);
CommandOutput cmd_maps(const ExperimentConfig& config);
CommandOutput cmd_report(const ExperimentConfig& config);
CommandOutput cmd_oracles(const ExperimentConfig& config);

void write_outputs(const CommandOutput& output, const std::filesystem::path& dir);

}  // namespace mdim::cli
