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

#include "ldphh/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "ldphh/error.hpp"

namespace ldphh {
namespace {

std::unordered_set<BitValue> distinct(std::span<const ScoredValue> found) {
  std::unordered_set<BitValue> out;
  for (const auto& s : found) {
    if (!out.insert(s.value).second) {
      throw InvalidArgument("identified values must be distinct");
    }
  }
  return out;
}

}  // namespace

bool ranks_before(const ScoredValue& a, const ScoredValue& b) noexcept {
  if (a.count != b.count) return a.count > b.count;
  return a.value < b.value;
}

GroundTruth::GroundTruth(std::vector<ScoredValue> ranked)
    : ranked_(std::move(ranked)) {
  std::sort(ranked_.begin(), ranked_.end(), ranks_before);
  distinct(ranked_);
}

GroundTruth GroundTruth::top(std::size_t k) const {
  GroundTruth out;
  out.ranked_.assign(ranked_.begin(),
                     ranked_.begin() + std::min(k, ranked_.size()));
  return out;
}

double f1(const GroundTruth& truth, std::span<const ScoredValue> found) {
  const auto found_set = distinct(found);
  std::size_t hit = 0;
  for (const auto& t : truth.ranked()) hit += found_set.contains(t.value);
  if (hit == 0) return 0.0;
  const double precision = static_cast<double>(hit) / found.size();
  const double recall = static_cast<double>(hit) / truth.size();
  return 2.0 * precision * recall / (precision + recall);
}

double ncr(const GroundTruth& truth, std::span<const ScoredValue> found,
           std::size_t k) {
  if (k == 0) throw InvalidArgument("ncr needs k >= 1");
  if (truth.size() < k) throw InvalidArgument("ground truth has fewer than k values");
  const auto found_set = distinct(found);
  double score = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    if (found_set.contains(truth.ranked()[j - 1].value)) score += k + 1 - j;
  }
  return score / (k * (k + 1) / 2.0);
}

double est_var(const GroundTruth& truth, std::span<const ScoredValue> found) {
  std::unordered_map<BitValue, double> estimates;
  for (const auto& s : found) {
    if (!estimates.emplace(s.value, s.count).second) {
      throw InvalidArgument("identified values must be distinct");
    }
  }
  double sum = 0.0;
  std::size_t hit = 0;
  for (const auto& t : truth.ranked()) {
    auto it = estimates.find(t.value);
    if (it == estimates.end()) continue;
    const double err = t.count - it->second;
    sum += err * err;
    ++hit;
  }
  if (hit == 0) throw InvalidArgument("no correctly identified value to score");
  return sum / hit;
}

}  // namespace ldphh
