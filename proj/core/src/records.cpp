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

#include "mdim/records.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"

#include "mdim/error.hpp"

namespace mdim {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string estimate_csv_header() {
  return "strategy,N,R,d,output,seed,replicate,delta_hat,sigma2_hat,nu_hat,n_evals,sigma2_source,"
         "tau_total\n";
}

std::string estimate_csv_row(const DeltaEstimate& e, std::size_t replicates) {
  std::string tau;
  for (std::size_t j = 0; j < e.tau_total.size(); ++j) {
    if (j) tau += ';';
    tau += format_double(e.tau_total[j]);
  }
  std::string row;
  row += to_string(e.strategy);
  row += ',' + std::to_string(e.n);
  row += ',' + std::to_string(replicates);
  row += ',' + std::to_string(e.d);
  row += ',' + std::to_string(e.output);
  row += ',' + std::to_string(e.seed);
  row += ',' + std::to_string(e.replicate);
  row += ',' + format_double(e.delta_hat);
  row += ',' + format_double(e.sigma2_hat);
  row += ',' + (e.nu_hat ? format_double(*e.nu_hat) : std::string());
  row += ',' + std::to_string(e.n_evals);
  row += ',' + std::string(sigma2_source(e.strategy));
  row += ',' + csv_escape(tau);
  row += '\n';
  return row;
}

std::string estimate_json(const DeltaEstimate& e, std::size_t replicates) {
  json j = {{"strategy", to_string(e.strategy)},
            {"N", e.n},
            {"R", replicates},
            {"d", e.d},
            {"output", e.output},
            {"seed", e.seed},
            {"replicate", e.replicate},
            {"delta_hat", e.delta_hat},
            {"sigma2_hat", e.sigma2_hat},
            {"nu_hat", e.nu_hat ? json(*e.nu_hat) : json(nullptr)},
            {"tau_total", e.tau_total},
            {"n_evals", e.n_evals},
            {"sigma2_source", sigma2_source(e.strategy)}};
  return j.dump();
}

DeltaEstimate parse_estimate_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DeltaEstimate e;
    e.strategy = parse_strategy(j.at("strategy").get<std::string>());
    e.n = j.at("N").get<std::size_t>();
    e.d = j.at("d").get<std::size_t>();
    e.output = j.at("output").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.replicate = j.at("replicate").get<std::uint64_t>();
    e.delta_hat = j.at("delta_hat").get<double>();
    e.sigma2_hat = j.at("sigma2_hat").get<double>();
    if (!j.at("nu_hat").is_null()) e.nu_hat = j.at("nu_hat").get<double>();
    e.tau_total = j.at("tau_total").get<std::vector<double>>();
    e.n_evals = j.at("n_evals").get<std::size_t>();
    if (e.tau_total.size() != e.d) throw FormatError("tau_total length differs from d");
    if (j.at("sigma2_source").get<std::string>() != sigma2_source(e.strategy)) {
      throw FormatError("sigma2_source does not match strategy");
    }
    return e;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("malformed estimate record: ") + ex.what());
  } catch (const ContractError& ex) {
    throw FormatError(std::string("malformed estimate record: ") + ex.what());
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line");
  return fields;
}

}  // namespace mdim
