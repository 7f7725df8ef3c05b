// Copyright 2026 The ldphh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPHH_RANDOM_HPP_
#define LDPHH_RANDOM_HPP_

#include <cstdint>
#include <limits>

#include "ldphh/hashing.hpp"

namespace ldphh {

// Stream split function: the seed of sub-stream `index` of `master`.
// Every per-user and per-purpose stream in the library is derived this way,
// so experiments are reproducible bit for bit from one master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

// Purpose tags passed to derive_seed to keep independent streams apart.
enum class Stream : std::uint64_t {
  kDatasetValues = 0x10,
  kDatasetSamples = 0x11,
  kGroupAssignment = 0x20,
  kPerturbation = 0x21,
  kSegmentChoice = 0x22,
  kChannelNoise = 0x23,
  kRepetition = 0x30,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream tag) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(tag) << 56);
}

// SplitMix64. Small state, cheap to create per user, and the bounded and
// real-valued draws below are defined here rather than by <random>
// distributions, whose output differs between standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t uniform(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return unit() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace ldphh

#endif  // LDPHH_RANDOM_HPP_
