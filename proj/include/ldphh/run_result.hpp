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

#ifndef LDPHH_RUN_RESULT_HPP_
#define LDPHH_RUN_RESULT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldphh/bit_value.hpp"
#include "ldphh/metrics.hpp"

namespace ldphh {

// Candidates kept after one identification round.
struct CandidateSet {
  unsigned round = 0;
  // Same length, distinct, ordered by (estimate desc, value asc).
  std::vector<BitValue> prefixes;
  std::vector<double> estimates;
};

struct RunMetrics {
  double f1 = 0.0;
  double ncr = 0.0;
  std::optional<double> var;  // absent when nothing was identified correctly
};

struct RunResult {
  std::string protocol;
  std::string variant;
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  // Final output with estimates scaled to the full population.
  Identified identified;
  std::uint64_t queries_used = 0;
  std::vector<CandidateSet> rounds;
  std::optional<RunMetrics> metrics;
};

RunMetrics score(const GroundTruth& truth, const RunResult& result,
                 std::size_t k);

// The RunResult JSON document; values as zero-padded MSB-first hex.
nlohmann::ordered_json to_json(const RunResult& result);

}  // namespace ldphh

#endif  // LDPHH_RUN_RESULT_HPP_
