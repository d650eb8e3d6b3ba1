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

#include "mdim/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace mdim {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Odd Weyl increment with enough bit transitions (as in SplittableRandom).
std::uint64_t mix_gamma(std::uint64_t z) noexcept {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
  z = (z ^ (z >> 33)) | 1ull;
  if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xaaaaaaaaaaaaaaaaull;
  return z;
}

}  // namespace

StreamId StreamId::compose(std::uint64_t replicate, std::uint64_t unit, std::uint64_t role) {
  std::uint64_t h = mix64(replicate + kGolden);
  h = mix64(h ^ (unit + 0x632be59bd9b4e019ull));
  h = mix64(h ^ (role + 0x85157af5ull));
  return StreamId{h};
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id)
    : seed_(seed),
      id_(id),
      key_(mix64(seed ^ mix64(id.value + kGolden))),
      gamma_(mix_gamma(key_ + 0x3c6ef372fe94f82bull)) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * gamma_);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace mdim
