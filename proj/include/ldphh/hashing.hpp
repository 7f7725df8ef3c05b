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

#ifndef LDPHH_HASHING_HPP_
#define LDPHH_HASHING_HPP_

#include <cstdint>

namespace ldphh {

// 64-bit avalanche finalizer (Stafford's "Mix13", as used by SplitMix64).
// A bijection on uint64_t.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// floor(x * d / 2^64) computed with 32x32->64 products so that loops over
// it vectorize. Exact for d < 2^32.
constexpr std::uint64_t reduce_range(std::uint64_t x, std::uint64_t d) noexcept {
  const std::uint64_t hi = x >> 32;
  const std::uint64_t lo = x & 0xFFFFFFFFULL;
  return (hi * d + ((lo * d) >> 32)) >> 32;
}

// Public part of the local-hashing family: a member is selected by a 64-bit
// seed, the value enters through its canonical key (BitValue::key()).
constexpr std::uint64_t seed_key(std::uint64_t seed) noexcept {
  return mix64(seed ^ 0x5851F42D4C957F2DULL);
}

// Zero-based bucket in [0, d) for a (seed_key, value key) pair.
constexpr std::uint64_t bucket_of(std::uint64_t skey, std::uint64_t vkey,
                                  std::uint64_t d) noexcept {
  return reduce_range(mix64(skey ^ vkey), d);
}

}  // namespace ldphh

#endif  // LDPHH_HASHING_HPP_
