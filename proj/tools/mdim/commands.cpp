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

#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mdim/anova.hpp"
#include "mdim/error.hpp"
#include "mdim/nn/histograms.hpp"
#include "mdim/nn/idx.hpp"
#include "mdim/nn/report.hpp"
#include "mdim/records.hpp"
#include "mdim/theory.hpp"

namespace mdim::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

EstimatorConfig estimator_config(const ExperimentConfig& c, Strategy s, std::uint64_t replicate) {
  EstimatorConfig e;
  e.strategy = s;
  e.n = c.n;
  e.seed = c.seed;
  e.replicate = replicate;
  e.order = c.order;
  e.threads = c.threads;
  return e;
}

/// Exact N * Var(delta estimate) when theory covers the function.
std::optional<double> oracle_n_var(const ExperimentConfig& c, Strategy s) {
  if (!c.testfn) return std::nullopt;
  const TestFunction& tf = *c.testfn;
  if (tf.structure == Structure::Additive) return static_cast<double>(c.n) * var_additive(s, tf.profiles, c.n);
  if (tf.structure == Structure::Product) return static_cast<double>(c.n) * var_product(s, tf.profiles, c.n, c.order);
  return std::nullopt;
}

std::string function_label(const ExperimentConfig& c) {
  if (c.testfn) return c.testfn->kind;
  return fmt::format("network {}{}", nn::to_string(c.network->target), c.network->output);
}

const nn::Network& require_network(const ExperimentConfig& c) {
  if (!c.network) throw ConfigError("this command needs a function of kind 'network'");
  return *c.network->net;
}

HistogramMode histogram_mode(const ExperimentConfig& c) {
  const std::string mode = c.raw.value("histogram_mode", "continuous");
  if (mode == "continuous") return HistogramMode::Continuous;
  if (mode == "atoms") return HistogramMode::Atoms;
  throw ConfigError("histogram_mode must be continuous or atoms");
}

}  // namespace

CommandOutput cmd_estimate(const ExperimentConfig& c) {
  const BlackBox box = c.box();
  const InputModel& model = c.input_model();
  CommandOutput out;
  std::string csv = estimate_csv_header();
  ordered_json records = ordered_json::array();
  out.summary = fmt::format("{:<18} {:>10} {:>14} {:>14} {:>10}\n", "strategy", "replicate", "delta_hat",
                            "sigma2_hat", "nu_hat");
  for (Strategy s : c.strategies) {
    for (std::uint64_t r = 0; r < c.r; ++r) {
      DeltaEstimate e = estimate_delta(box, model, estimator_config(c, s, r));
      if (e.nu_hat && e.sigma2_hat <= c.variance_floor) {
        e.nu_hat.reset();
        out.warnings.push_back(fmt::format("{} replicate {}: sigma2_hat {} is below the variance floor; nu_hat omitted",
                                           to_string(s), r, format_double(e.sigma2_hat)));
      }
      csv += estimate_csv_row(e, c.r);
      records.push_back(ordered_json::parse(estimate_json(e, c.r)));
      out.summary += fmt::format("{:<18} {:>10} {:>14.6g} {:>14.6g} {:>10}\n", to_string(s), r, e.delta_hat,
                                 e.sigma2_hat, e.nu_hat ? fmt::format("{:.4f}", *e.nu_hat) : "NA");
    }
  }
  ordered_json doc;
  doc["function"] = function_label(c);
  if (c.testfn) {
    doc["exact"] = {{"sigma2", c.testfn->sigma2 ? ordered_json(*c.testfn->sigma2) : ordered_json(nullptr)},
                    {"delta", c.testfn->delta ? ordered_json(*c.testfn->delta) : ordered_json(nullptr)},
                    {"nu", c.testfn->nu ? ordered_json(*c.testfn->nu) : ordered_json(nullptr)}};
  }
  doc["records"] = std::move(records);
  out.files.push_back({"estimate.csv", csv, {}});
  out.files.push_back({"estimate.json", doc.dump(2) + "\n", {}});
  return out;
}

CommandOutput cmd_compare_variance(const ExperimentConfig& c) {
  const BlackBox box = c.box();
  const InputModel& model = c.input_model();
  CommandOutput out;
  if (c.r < 100) {
    out.warnings.push_back(fmt::format("R = {} is below 100; variance estimates are rough", c.r));
  }

  struct Row {
    Strategy strategy;
    double mean, n_var, n_var_se;
    std::optional<double> oracle;
  };
  std::vector<Row> rows;
  for (Strategy s : c.strategies) {
    const ReplicateSummary sum = replicate_variance(box, model, estimator_config(c, s, 0), c.r);
    const auto deltas = sum.deltas();
    double m4 = 0.0;
    for (double x : deltas) m4 += std::pow(x - sum.mean, 4);
    m4 /= static_cast<double>(deltas.size());
    // plug-in standard error of a sample variance, no normality assumption
    const double se = std::sqrt(std::max(0.0, (m4 - sum.variance * sum.variance) / static_cast<double>(c.r)));
    const double n = static_cast<double>(c.n);
    rows.push_back({s, sum.mean, n * sum.variance, n * se, oracle_n_var(c, s)});
  }
  auto variance_of = [&](Strategy s) {
    for (const Row& r : rows) {
      if (r.strategy == s) return r.n_var;
    }
    return kNaN;
  };
  const double naive = variance_of(Strategy::Naive);
  const double radial = variance_of(Strategy::Radial);

  bool sign_condition = false;
  if (c.testfn && c.testfn->structure == Structure::Product) {
    const auto cond = covariance_sign_condition(c.testfn->profiles);
    sign_condition = std::all_of(cond.begin(), cond.end(), [](bool b) { return b; });
  }

  std::string csv = "strategy,N,R,mean_delta,n_var,n_var_se,n_var_oracle,empirical_over_oracle,var_over_naive,radial_over_this,flag\n";
  ordered_json rows_json = ordered_json::array();
  out.summary = fmt::format("{:<18} {:>12} {:>10} {:>12} {:>10} {:>10} {:>10}\n", "strategy", "N*var", "se",
                            "oracle", "emp/orc", "/naive", "radial/");
  for (const Row& r : rows) {
    const double oracle = r.oracle.value_or(kNaN);
    const double over_oracle = r.n_var / oracle;
    const double over_naive = r.n_var / naive;
    const double radial_over = radial / r.n_var;
    std::vector<std::string> flags;
    if (c.r < 100) flags.emplace_back("low_R");
    if (r.strategy == Strategy::Radial && sign_condition) flags.emplace_back("radial_not_better_guaranteed");
    std::string flag;
    for (const auto& f : flags) flag += (flag.empty() ? "" : ";") + f;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.strategy), c.n, c.r, format_double(r.mean),
                       format_double(r.n_var), format_double(r.n_var_se),
                       r.oracle ? format_double(oracle) : std::string("NA"),
                       r.oracle ? format_double(over_oracle) : std::string("NA"), format_double(over_naive),
                       format_double(radial_over), csv_escape(flag));
    rows_json.push_back({{"strategy", to_string(r.strategy)},
                         {"mean_delta", r.mean},
                         {"n_var", r.n_var},
                         {"n_var_se", r.n_var_se},
                         {"n_var_oracle", number_or_null(oracle)},
                         {"empirical_over_oracle", number_or_null(over_oracle)},
                         {"var_over_naive", number_or_null(over_naive)},
                         {"radial_over_this", number_or_null(radial_over)},
                         {"flags", flags}});
    out.summary += fmt::format("{:<18} {:>12.5g} {:>10.3g} {:>12} {:>10} {:>10.4f} {:>10.4f}{}\n",
                               to_string(r.strategy), r.n_var, r.n_var_se,
                               r.oracle ? fmt::format("{:.5g}", oracle) : "NA",
                               r.oracle ? fmt::format("{:.4f}", over_oracle) : "NA", over_naive, radial_over,
                               flag.empty() ? "" : "  " + flag);
  }
  ordered_json doc;
  doc["function"] = function_label(c);
  doc["N"] = c.n;
  doc["R"] = c.r;
  doc["seed"] = c.seed;
  doc["covariance_sign_condition"] = sign_condition;
  doc["rows"] = std::move(rows_json);
  out.files.push_back({"compare_variance.csv", csv, {}});
  out.files.push_back({"compare_variance.json", doc.dump(2) + "\n", {}});
  return out;
}

CommandOutput cmd_histograms(const ExperimentConfig& c) {
  const auto& j = c.raw;
  nn::ImageArchive archive;
  if (j.contains("images")) {
    if (!j.contains("labels")) throw ConfigError("'images' needs a matching 'labels' file");
    archive = nn::read_idx(c.resolve(j.at("images").get<std::string>()), c.resolve(j.at("labels").get<std::string>()));
  } else if (j.contains("csv")) {
    archive = nn::read_image_csv(c.resolve(j.at("csv").get<std::string>()), j.value("rows", std::size_t{28}),
                                 j.value("cols", std::size_t{28}));
  } else {
    throw ConfigError("histograms needs 'images' and 'labels' (IDX) or 'csv'");
  }
  const std::size_t bins = j.value("bins", std::size_t{256});
  auto set = std::make_shared<nn::PixelHistogramSet>(nn::build_histograms(archive, bins));

  CommandOutput out;
  ordered_json classes = ordered_json::array();
  for (const auto& [cls, hist] : set->sets) {
    const std::string name = nn::mdhs_file_name(cls);
    classes.push_back({{"class", cls}, {"images", hist.images}, {"file", name}});
    out.files.push_back({name, {}, [set, cls = cls](const std::filesystem::path& p) {
                           nn::write_mdhs(set->sets.at(cls), p);
                         }});
    out.summary += fmt::format("{:<14} {:>6} images\n", name, hist.images);
  }
  ordered_json errors = ordered_json::object();
  for (const auto& [cls, msg] : set->errors) {
    errors[std::to_string(cls)] = msg;
    out.warnings.push_back(fmt::format("class {}: {}", cls, msg));
  }
  ordered_json doc;
  doc["dataset"] = set->dataset;
  doc["rows"] = set->rows;
  doc["cols"] = set->cols;
  doc["bins"] = set->bins;
  doc["classes"] = std::move(classes);
  doc["errors"] = std::move(errors);
  out.files.push_back({"histograms.json", doc.dump(2) + "\n", {}});
  return out;
}

CommandOutput cmd_maps(const ExperimentConfig& c) {
  const nn::Network& net = require_network(c);
  const nn::IndexKind kind = nn::parse_index_kind(c.raw.value("index", "total"));
  const std::string sampler_name = c.raw.value("sampler", "uniform");
  const nn::Sampler sampler{sampler_name, c.input_model()};
  nn::IndexMapOptions o;
  o.strategy = c.single_strategy();
  o.n = c.n;
  o.seed = c.seed;
  o.threads = c.threads;

  std::vector<std::size_t> outputs;
  if (c.raw.contains("outputs")) {
    outputs = c.raw.at("outputs").get<std::vector<std::size_t>>();
  } else {
    for (std::size_t y = 0; y < net.classes(); ++y) outputs.push_back(y);
  }
  for (std::size_t y : outputs) {
    if (y >= net.classes()) throw ConfigError("map output index out of range");
  }

  const auto maps = nn::index_maps(net, c.network->target, sampler, kind, o);
  CommandOutput out;
  ordered_json entries = ordered_json::array();
  for (std::size_t y : outputs) {
    const nn::IndexMap& m = maps[y];
    const std::string stem =
        fmt::format("map_{}_{}{}_{}", sampler_name, nn::to_string(m.target), y, nn::to_string(kind));
    double peak = 0.0, total = 0.0;
    for (double v : m.values) {
      peak = std::max(peak, v);
      total += v;
    }
    out.files.push_back({stem + ".pgm", nn::pgm16(m), {}});
    out.files.push_back({stem + ".csv", nn::index_map_csv(m), {}});
    entries.push_back({{"output", y},
                       {"pgm", stem + ".pgm"},
                       {"csv", stem + ".csv"},
                       {"sigma2_hat", m.sigma2_hat},
                       {"sum", total},
                       {"max", peak}});
    out.summary += fmt::format("{:<28} sum {:>12.5g}  max {:>12.5g}  sigma2 {:>12.5g}\n", stem, total, peak,
                               m.sigma2_hat);
  }
  ordered_json doc;
  doc["sampler"] = sampler_name;
  doc["target"] = nn::to_string(c.network->target);
  doc["index"] = nn::to_string(kind);
  doc["strategy"] = to_string(o.strategy);
  doc["N"] = c.n;
  doc["seed"] = c.seed;
  doc["rows"] = maps.front().rows;
  doc["cols"] = maps.front().cols;
  doc["maps"] = std::move(entries);
  out.files.push_back({"maps.json", doc.dump(2) + "\n", {}});
  return out;
}

CommandOutput cmd_report(const ExperimentConfig& c) {
  const nn::Network& net = require_network(c);
  std::vector<std::string> names;
  if (c.raw.contains("samplers")) {
    names = c.raw.at("samplers").get<std::vector<std::string>>();
  } else {
    names = {"binary", "uniform"};
    if (c.raw.contains("histograms")) {
      names.emplace_back("combined");
      for (int y = 0; y < 10; ++y) names.push_back("h" + std::to_string(y));
    }
  }
  const HistogramMode mode = histogram_mode(c);
  std::vector<nn::Sampler> samplers;
  for (const auto& name : names) samplers.push_back(make_sampler(c, name, mode));

  nn::ReportOptions o;
  o.strategy = c.single_strategy();
  o.n = c.n;
  o.seed = c.seed;
  o.threads = c.threads;
  o.variance_floor = c.variance_floor;
  if (c.raw.contains("targets")) {
    o.targets.clear();
    for (const auto& t : c.raw.at("targets").get<std::vector<std::string>>()) o.targets.push_back(nn::parse_target(t));
  }
  const auto report = nn::mean_dimension_report(net, samplers, o);

  CommandOutput out;
  out.files.push_back({"report.csv", nn::report_csv(report), {}});
  ordered_json cells = ordered_json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"sampler", cell.sampler},
                     {"target", nn::to_string(cell.target)},
                     {"y", cell.output},
                     {"nu_hat", number_or_null(cell.nu_hat)},
                     {"delta_hat", cell.delta_hat},
                     {"sigma2_hat", cell.sigma2_hat},
                     {"degenerate", cell.degenerate},
                     {"flag", cell.flag}});
    if (!cell.flag.empty()) {
      out.warnings.push_back(fmt::format("{} {}{}: {}", cell.sampler, nn::to_string(cell.target), cell.output, cell.flag));
    }
  }
  for (nn::Target t : o.targets) {
    const std::string wide = nn::report_wide_csv(report, t);
    out.files.push_back({fmt::format("report_{}_wide.csv", nn::to_string(t)), wide, {}});
    out.summary += fmt::format("mean dimension, target {}\n{}\n", nn::to_string(t), wide);
  }
  ordered_json doc;
  doc["dims"] = report.dims;
  doc["classes"] = report.classes;
  doc["strategy"] = to_string(report.strategy);
  doc["N"] = report.n;
  doc["seed"] = report.seed;
  doc["variance_floor"] = c.variance_floor;
  doc["samplers"] = report.samplers;
  doc["cells"] = std::move(cells);
  out.files.push_back({"report.json", doc.dump(2) + "\n", {}});
  return out;
}

CommandOutput cmd_oracles(const ExperimentConfig& c) {
  if (!c.testfn) throw ConfigError("oracles needs a test-function descriptor");
  const TestFunction& tf = *c.testfn;
  ordered_json doc;
  doc["function"] = ordered_json::parse(tf.descriptor);
  doc["N"] = c.n;
  auto exact = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  std::optional<double> sigma2 = tf.sigma2, delta = tf.delta, nu = tf.nu;
  const auto& coords = tf.model.coords();
  const bool finite = std::all_of(coords.begin(), coords.end(), [](const auto& x) { return x.is_finite(); });
  if (!delta && finite) {
    const auto comps = anova_enumerate(tf.box, tf.model);
    sigma2 = comps.variance();
    delta = comps.delta();
    if (comps.variance() > 0.0) nu = comps.nu();
  }
  doc["sigma2"] = exact(sigma2);
  doc["delta"] = exact(delta);
  doc["nu"] = exact(nu);

  CommandOutput out;
  out.summary = fmt::format("{}: sigma2 {}  delta {}  nu {}\n", tf.kind, sigma2 ? format_double(*sigma2) : "NA",
                            delta ? format_double(*delta) : "NA", nu ? format_double(*nu) : "NA");

  if (tf.structure != Structure::Other) {
    ordered_json factors = ordered_json::array();
    for (const MomentProfile& p : tf.profiles) {
      const DifferenceMoments l = difference_moments(p.sigma2, p.kappa);
      factors.push_back({{"mu", p.mu},
                         {"sigma2", p.sigma2},
                         {"kappa", p.kappa},
                         {"eta", p.eta},
                         {"source", to_string(p.source)},
                         {"difference_moments",
                          {{"fourth", l.fourth},
                           {"var_square", l.var_square},
                           {"cross_independent", l.cross_independent},
                           {"cross_shared", l.cross_shared}}}});
    }
    doc["factors"] = std::move(factors);
    ordered_json vars = ordered_json::object();
    out.summary += fmt::format("{:<18} {:>14}\n", "strategy", "N*var");
    for (Strategy s : c.strategies) {
      const auto v = oracle_n_var(c, s);
      vars[std::string(to_string(s))] = number_or_null(v.value_or(kNaN));
      out.summary += fmt::format("{:<18} {:>14.6g}\n", to_string(s), v.value_or(kNaN));
    }
    doc["n_var"] = std::move(vars);
    if (tf.structure == Structure::Product) {
      doc["covariance_sign_condition"] = covariance_sign_condition(tf.profiles);
    }
  }
  out.files.push_back({"oracles.json", doc.dump(2) + "\n", {}});
  return out;
}

void write_outputs(const CommandOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const OutputFile& f : output.files) {
    const auto path = dir / f.name;
    if (f.writer) {
      f.writer(path);
      continue;
    }
    std::ofstream os(path, std::ios::binary);
    os.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
    if (!os) throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace mdim::cli
