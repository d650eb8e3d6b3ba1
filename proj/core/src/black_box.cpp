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

#include "mdim/black_box.hpp"

#include <vector>

#include "mdim/error.hpp"

namespace mdim {

BlackBox::BlackBox(std::size_t dims, std::size_t outputs, Fn fn, bool concurrent, std::string name)
    : dims_(dims),
      outputs_(outputs),
      fn_(std::move(fn)),
      concurrent_(concurrent),
      name_(std::move(name)) {
  if (dims_ == 0 || outputs_ == 0) throw ContractError("black box needs d >= 1 and m >= 1");
  if (!fn_) throw ContractError("black box without a function");
  if (!concurrent_) lock_ = std::make_shared<std::mutex>();
}

BlackBox BlackBox::scalar(std::size_t dims, ScalarFn fn, std::string name) {
  return BlackBox(
      dims, 1,
      [f = std::move(fn)](std::span<const double> x, std::span<double> out) { out[0] = f(x); },
      true, std::move(name));
}

void BlackBox::evaluate(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dims_ || out.size() != outputs_) {
    throw ContractError("black box '" + name_ + "': argument shape mismatch");
  }
  if (lock_) {
    std::lock_guard guard(*lock_);
    fn_(x, out);
  } else {
    fn_(x, out);
  }
}

double BlackBox::operator()(std::span<const double> x) const {
  if (outputs_ == 1) {
    double y = 0.0;
    evaluate(x, std::span<double>(&y, 1));
    return y;
  }
  std::vector<double> out(outputs_);
  evaluate(x, out);
  return out[0];
}

BlackBox BlackBox::select(std::size_t output) const {
  if (output >= outputs_) throw ContractError("black box: output index out of range");
  if (outputs_ == 1) return *this;
  BlackBox parent = *this;
  return BlackBox(
      dims_, 1,
      [parent, output](std::span<const double> x, std::span<double> out) {
        std::vector<double> all(parent.outputs());
        parent.evaluate(x, all);
        out[0] = all[output];
      },
      true, name_ + "[" + std::to_string(output) + "]");
}

}  // namespace mdim
