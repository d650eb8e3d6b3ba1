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
#include <stdexcept>
#include <string>
#include <vector>

namespace mdim {

/// Violated precondition on an argument (index out of range, N < 1, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The black box returned a non-finite value. Carries the offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// An evaluation error raised inside replicate `replicate` of a replicated run.
class ReplicateError : public EvaluationError {
 public:
  ReplicateError(std::size_t replicate, const EvaluationError& cause)
      : EvaluationError("replicate " + std::to_string(replicate) + ": " + cause.what(),
                        cause.point()),
        replicate_(replicate) {}

  std::size_t replicate() const noexcept { return replicate_; }

 private:
  std::size_t replicate_;
};

/// Variance too small to form a mean-dimension ratio.
class DegenerateVarianceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed binary or text input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ShapeMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace mdim
