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

#ifndef LDPHH_DATAGEN_HPP_
#define LDPHH_DATAGEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldphh/bit_value.hpp"
#include "ldphh/distribution.hpp"
#include "ldphh/metrics.hpp"

namespace ldphh {

struct Dataset {
  unsigned m = 0;
  std::vector<BitValue> values;

  std::size_t n() const noexcept { return values.size(); }
};

struct GeneratorSpec {
  DistributionSpec dist;
  unsigned m = 0;
  std::size_t n = 0;
  std::uint64_t master_seed = 0;
};

// Draws dist.support() distinct uniformly random m-bit values, assigns them
// the distribution's rank frequencies in draw order and samples n values i.i.d.
Dataset generate(const GeneratorSpec& spec);

enum class LoadMode {
  kInt,   // one non-negative decimal integer per line
  kText,  // one string per line, bytes packed MSB-first
};

Dataset load(std::istream& in, unsigned m, LoadMode mode);
Dataset load(const std::string& path, unsigned m, LoadMode mode);
// Writes values as decimal integers, one per line (the kInt format).
void save(std::ostream& out, const Dataset& data);

// Exact counts of every distinct value, ranked (count desc, value asc).
GroundTruth exact_counts(const Dataset& data);

// Ground-truth sidecar written next to generated datasets.
std::string sidecar_json(const GeneratorSpec& spec, const GroundTruth& truth,
                         std::size_t top);

}  // namespace ldphh

#endif  // LDPHH_DATAGEN_HPP_
