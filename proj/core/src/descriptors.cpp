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

#include "mdim/descriptors.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>

#include "mdim/error.hpp"
#include "mdim/nn/histograms.hpp"

namespace mdim {

namespace {

using nlohmann::json;

HistogramMode parse_mode(const json& j) {
  const std::string mode = j.value("mode", "continuous");
  if (mode == "continuous") return HistogramMode::Continuous;
  if (mode == "atoms") return HistogramMode::Atoms;
  throw FormatError("unknown histogram mode '" + mode + "'");
}

CoordinateDistribution parse_coord(const json& j) {
  if (j.is_string()) return parse_coord(json{{"kind", j}});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform01") return CoordinateDistribution::uniform01();
  if (kind == "bernoulli01") return CoordinateDistribution::bernoulli01();
  if (kind == "std_gaussian") return CoordinateDistribution::std_gaussian();
  if (kind == "histogram") {
    return CoordinateDistribution::histogram(j.at("edges").get<std::vector<double>>(),
                                             j.at("probs").get<std::vector<double>>(), parse_mode(j));
  }
  if (kind == "finite") {
    return CoordinateDistribution::finite(j.at("values").get<std::vector<double>>(),
                                          j.at("probs").get<std::vector<double>>());
  }
  throw FormatError("unknown coordinate kind '" + kind + "'");
}

InputModel parse_model(const json& j, const std::filesystem::path& base_dir) {
  if (j.contains("histogram_file")) {
    std::filesystem::path file = j.at("histogram_file").get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return nn::histogram_model(nn::read_mdhs(file), parse_mode(j));
  }
  const json& coords = j.at("coords");
  if (coords.is_array()) {
    std::vector<CoordinateDistribution> out;
    for (const auto& c : coords) out.push_back(parse_coord(c));
    if (j.contains("d") && j.at("d").get<std::size_t>() != out.size()) {
      throw FormatError("input model: d disagrees with the number of coords");
    }
    return InputModel(std::move(out));
  }
  return InputModel(j.at("d").get<std::size_t>(), parse_coord(coords));
}

Factor parse_factor(const json& j) {
  const CoordinateDistribution dist =
      j.contains("dist") ? parse_coord(j.at("dist")) : CoordinateDistribution::uniform01();
  json g = j.value("g", json{{"kind", "identity"}});
  if (g.is_string()) g = json{{"kind", g}};  // shorthand "identity"
  const std::string kind = g.at("kind").get<std::string>();
  if (kind == "identity") return Factor::identity(dist);
  if (kind == "affine") {
    return Factor::affine(dist, g.value("shift", 0.0), g.value("scale", 1.0));
  }
  if (kind == "sobol_g") {
    if (!std::holds_alternative<Uniform01>(dist.kind())) {
      throw FormatError("sobol_g factors are defined on uniform01 only");
    }
    return Factor::sobol_g(g.at("a").get<double>());
  }
  if (kind == "constant") return Factor::constant(g.at("c").get<double>(), dist);
  throw FormatError("unknown factor kind '" + kind + "'");
}

std::vector<Factor> parse_factors(const json& j) {
  std::vector<Factor> out;
  const json& factors = j.at("factors");
  if (factors.is_array()) {
    for (const auto& f : factors) out.push_back(parse_factor(f));
  } else {
    const std::size_t d = j.at("d").get<std::size_t>();
    for (std::size_t t = 0; t < d; ++t) out.push_back(parse_factor(factors));
  }
  return out;
}

template <class F>
auto guarded(std::string_view what, F&& fn) {
  try {
    return fn();
  } catch (const json::exception& ex) {
    throw FormatError(std::string(what) + ": " + ex.what());
  } catch (const ContractError& ex) {
    throw FormatError(std::string(what) + ": " + ex.what());
  }
}

}  // namespace

InputModel parse_input_model(std::string_view text, const std::filesystem::path& base_dir) {
  return guarded("input model", [&] { return parse_model(json::parse(text), base_dir); });
}

TestFunction parse_test_function(std::string_view text) {
  return guarded("test function", [&] {
    const json j = json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "additive") return make_additive(j.value("mu", 0.0), parse_factors(j));
    if (kind == "product") return make_product(parse_factors(j));
    if (kind == "sobol_g") return make_sobol_g(j.at("a").get<std::vector<double>>());
    if (kind == "two_norm") return make_two_norm(j.at("d").get<std::size_t>());
    if (kind == "discrete") {
      return make_discrete(parse_model(j.at("model"), {}), j.at("table").get<std::vector<double>>());
    }
    throw FormatError("unknown test function kind '" + kind + "'");
  });
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mdim
