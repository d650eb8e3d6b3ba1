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

#include <cstdint>
#include <limits>

namespace mdim {

/// Identifies one independent random stream under a run seed.
///
/// Streams are addressed by (replicate, unit, role): `unit` is a chunk of
/// sample indices, a pixel, or a variable depending on the caller, and `role`
/// separates the draws of different algorithms that share a replicate.
struct StreamId {
  std::uint64_t value = 0;

  static StreamId compose(std::uint64_t replicate, std::uint64_t unit, std::uint64_t role);
};

/// Counter-based generator: draw n of stream (seed, id) is a pure function of
/// (seed, id, n). Identical (seed, id) pairs reproduce identical sequences on
/// every platform and regardless of which thread advances the stream.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1).
  double uniform_open();

  /// Standard normal (Box-Muller, second variate cached).
  double normal();

  std::uint64_t seed() const noexcept { return seed_; }
  StreamId id() const noexcept { return id_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::uint64_t key_;
  std::uint64_t gamma_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 output finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace mdim
