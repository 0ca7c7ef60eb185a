// Copyright 2026 The FairLabel Authors
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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace flc {

// Counter-based 64-bit generator: the i-th output is a fixed bijective mix of
// (key + i * golden_gamma), i.e. SplitMix64 evaluated at an explicit counter.
// Outputs are identical across platforms and standard libraries, which the
// std:: distributions do not guarantee, so sampling helpers live here too.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(Mix(seed) ^ Mix(stream + 0x632BE59BD9B4E019ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return At(counter_++); }

  // Random access into the stream without advancing it.
  result_type At(std::uint64_t index) const {
    return Mix(key_ + (index + 1) * kGamma);
  }

  std::uint64_t counter() const { return counter_; }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound > 0. Unbiased (rejection).
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x = (*this)();
    while (x >= limit) x = (*this)();
    return x % bound;
  }

  // Standard normal via Box-Muller; one draw per call, no cached spare.
  double Normal() {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  static constexpr std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Seed for replication `rep` of a run seeded with `seed`.
inline std::uint64_t ReplicationSeed(std::uint64_t seed, std::uint64_t rep) {
  return CounterRng::Mix(seed ^ CounterRng::Mix(rep + 0x5851F42D4C957F2DULL));
}

}  // namespace flc
