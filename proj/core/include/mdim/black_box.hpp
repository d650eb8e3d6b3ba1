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
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>

namespace mdim {

/// A deterministic map from R^d to R^m.
///
/// Multi-output boxes (a classifier's ten scores, say) are evaluated once per
/// point and every output is accumulated; scalar APIs pick one output.
class BlackBox {
 public:
  using Fn = std::function<void(std::span<const double> x, std::span<double> out)>;
  using ScalarFn = std::function<double(std::span<const double> x)>;

  /// `concurrent` declares that `fn` may be called from several threads at
  /// once. Boxes that are not get a serializing lock around every call.
  BlackBox(std::size_t dims, std::size_t outputs, Fn fn, bool concurrent = true,
           std::string name = {});

  static BlackBox scalar(std::size_t dims, ScalarFn fn, std::string name = {});

  std::size_t dims() const noexcept { return dims_; }
  std::size_t outputs() const noexcept { return outputs_; }
  bool concurrent() const noexcept { return concurrent_; }
  const std::string& name() const noexcept { return name_; }

  void evaluate(std::span<const double> x, std::span<double> out) const;

  /// Output 0 of a single point.
  double operator()(std::span<const double> x) const;

  /// Restriction to a single output.
  BlackBox select(std::size_t output) const;

 private:
  std::size_t dims_;
  std::size_t outputs_;
  Fn fn_;
  bool concurrent_;
  std::string name_;
  std::shared_ptr<std::mutex> lock_;
};

}  // namespace mdim
