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

#include "mdim/nn/report.hpp"

#include <cmath>
#include <limits>

#include "mdim/error.hpp"
#include "mdim/records.hpp"

namespace mdim::nn {

const ReportCell& MeanDimensionReport::cell(std::string_view sampler, Target target, std::size_t y) const {
  for (const auto& c : cells) {
    if (c.sampler == sampler && c.target == target && c.output == y) return c;
  }
  throw ContractError("no report cell for sampler '" + std::string(sampler) + "', target " +
                      std::string(to_string(target)) + ", class " + std::to_string(y));
}

MeanDimensionReport mean_dimension_report(const Network& net, std::span<const Sampler> samplers,
                                          const ReportOptions& options) {
  if (samplers.empty()) throw ContractError("report needs at least one sampler");
  if (options.targets.empty()) throw ContractError("report needs at least one target");
  if (!(options.variance_floor >= 0.0)) throw ContractError("variance floor must be >= 0");
  const std::shared_ptr<const Network> handle(std::shared_ptr<const void>{}, &net);
  const BlackBox box = network_box(handle);
  const std::size_t classes = net.classes();
  const double d = static_cast<double>(net.input_size());

  MeanDimensionReport report;
  report.dims = net.input_size();
  report.classes = classes;
  report.strategy = options.strategy;
  report.n = options.n;
  report.seed = options.seed;

  EstimatorConfig config;
  config.strategy = options.strategy;
  config.n = options.n;
  config.seed = options.seed;
  config.threads = options.threads;
  for (const Sampler& s : samplers) {
    if (s.model.dims() != net.input_size()) {
      throw ContractError("sampler '" + s.name + "' does not match the network input size");
    }
    report.samplers.push_back(s.name);
    const auto estimates = estimate_delta_all(box, s.model, config);
    double logit_scale = 0.0;
    for (std::size_t y = 0; y < classes; ++y) {
      logit_scale = std::max(logit_scale, std::sqrt(estimates[y].sigma2_hat));
    }
    for (Target target : options.targets) {
      const double scale = target == Target::Softmax ? 1.0 : logit_scale;
      for (std::size_t y = 0; y < classes; ++y) {
        const DeltaEstimate& e = estimates[output_index(target, y, classes)];
        ReportCell c;
        c.sampler = s.name;
        c.target = target;
        c.output = y;
        c.delta_hat = e.delta_hat;
        c.sigma2_hat = e.sigma2_hat;
        if (e.sigma2_hat <= options.variance_floor * scale * scale) {
          c.degenerate = true;
          c.flag = "tiny_variance";
          c.nu_hat = std::numeric_limits<double>::quiet_NaN();
        } else {
          c.nu_hat = e.delta_hat / e.sigma2_hat;
          if (!std::isfinite(c.nu_hat) || c.nu_hat < 0.0 || c.nu_hat > d) c.flag = "nu_out_of_range";
        }
        report.cells.push_back(std::move(c));
      }
    }
  }
  return report;
}

std::string report_csv(const MeanDimensionReport& report) {
  std::string out = "sampler,target,y,nu_hat,delta_hat,sigma2_hat,degenerate,flag\n";
  for (const auto& c : report.cells) {
    out += csv_escape(c.sampler) + ',' + std::string(to_string(c.target)) + ',' + std::to_string(c.output) + ',' +
           (c.degenerate ? std::string("NA") : format_double(c.nu_hat)) + ',' + format_double(c.delta_hat) + ',' +
           format_double(c.sigma2_hat) + ',' + (c.degenerate ? "1" : "0") + ',' + c.flag + '\n';
  }
  return out;
}

std::string report_wide_csv(const MeanDimensionReport& report, Target target) {
  std::string out = "sampler";
  for (std::size_t y = 0; y < report.classes; ++y) out += ",y" + std::to_string(y);
  out += '\n';
  for (const auto& s : report.samplers) {
    out += csv_escape(s);
    for (std::size_t y = 0; y < report.classes; ++y) {
      const ReportCell& c = report.cell(s, target, y);
      out += ',' + (c.degenerate ? std::string("NA") : format_double(c.nu_hat));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mdim::nn
