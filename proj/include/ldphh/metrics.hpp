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

#ifndef LDPHH_METRICS_HPP_
#define LDPHH_METRICS_HPP_

#include <span>
#include <vector>

#include "ldphh/bit_value.hpp"

namespace ldphh {

// A value with a count: true for ground truth, estimated for protocol output.
struct ScoredValue {
  BitValue value;
  double count = 0.0;
  friend bool operator==(const ScoredValue&, const ScoredValue&) = default;
};

// Orders by count descending, then value ascending.
bool ranks_before(const ScoredValue& a, const ScoredValue& b) noexcept;

// True heavy hitters in rank order.
class GroundTruth {
 public:
  GroundTruth() = default;
  // Sorts by (count desc, value asc); throws on duplicate values.
  explicit GroundTruth(std::vector<ScoredValue> ranked);

  std::size_t size() const noexcept { return ranked_.size(); }
  const std::vector<ScoredValue>& ranked() const noexcept { return ranked_; }
  // The first k entries.
  GroundTruth top(std::size_t k) const;

 private:
  std::vector<ScoredValue> ranked_;
};

using Identified = std::vector<ScoredValue>;

double f1(const GroundTruth& truth, std::span<const ScoredValue> found);
// Rank-weighted recall over the first k true values.
double ncr(const GroundTruth& truth, std::span<const ScoredValue> found,
           std::size_t k);
// Mean squared error of the estimates on correctly identified values.
// Throws InvalidArgument when nothing was identified correctly.
double est_var(const GroundTruth& truth, std::span<const ScoredValue> found);

}  // namespace ldphh

#endif  // LDPHH_METRICS_HPP_
