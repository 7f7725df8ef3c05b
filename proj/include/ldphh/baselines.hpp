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

#ifndef LDPHH_BASELINES_HPP_
#define LDPHH_BASELINES_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ldphh/bit_value.hpp"
#include "ldphh/datagen.hpp"
#include "ldphh/freq_oracle.hpp"
#include "ldphh/random.hpp"
#include "ldphh/run_result.hpp"

namespace ldphh {

struct JointEstimateInput {
  double I_ab = 0.0;     // reports supporting both patterns
  double n = 0.0;        // reports in the group
  double n_a_est = 0.0;  // marginal estimate of the first pattern
  double n_b_est = 0.0;  // marginal estimate of the second pattern
  double p = 0.0;        // support probability of a held pattern
  double q = 0.0;        // support probability of any other pattern
};

// Unbiased estimate of the number of users holding both patterns.
double joint_estimate(const JointEstimateInput& in);

// The same for |V| = arity answers. marginals[mask] estimates the count of
// users holding every answer in the subset `mask` of {0..arity-1}; entries
// are needed for every non-empty proper subset (the empty one is n).
double joint_estimate_multi(double I_V, const std::map<unsigned, double>& marginals,
                            unsigned arity, double n, double p, double q);

enum class BaselineVariant {
  kSplit,      // each user splits the budget across all sub-reports
  kPartition,  // a held-out fraction reports only the full value
};

const char* to_string(BaselineVariant v);
BaselineVariant parse_variant(std::string_view name);

struct SpmConfig {
  unsigned m = 0;
  unsigned g = 2;  // segment count
  std::size_t k = 1;
  double eps = 1.0;
  std::uint64_t query_limit = std::uint64_t{1} << 20;
  BaselineVariant variant = BaselineVariant::kSplit;
  double final_user_fraction = 0.0;  // used by kPartition

  unsigned s() const noexcept { return g ? m / g : 0; }
  std::size_t pair_count() const noexcept { return g * (g - 1) / 2; }
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// Smallest g >= 2 dividing m whose segment, pair and k+1 final queries fit.
SpmConfig spm_plan(unsigned m, std::size_t k, std::uint64_t query_limit,
                   PrivacyBudget eps, BaselineVariant variant = BaselineVariant::kSplit,
                   double final_user_fraction = 0.1);

// Segment pair (alpha, beta), 1 <= alpha < beta <= g, uniform over all pairs.
std::pair<unsigned, unsigned> spm_pair(std::uint64_t user_index, unsigned g,
                                       std::uint64_t master_seed);

struct SpmReport {
  std::optional<OlhReport> full;
  unsigned alpha = 1;
  unsigned beta = 2;
  std::optional<OlhReport> seg_a;
  std::optional<OlhReport> seg_b;
};

// Split variant: full value and both segments at eps/3 each.
SpmReport spm_client_report(const BitValue& v, unsigned alpha, unsigned beta,
                            const SpmConfig& cfg, Rng& rng);

RunResult spm_run(const Dataset& data, const SpmConfig& cfg,
                  std::uint64_t master_seed);

struct McmConfig {
  unsigned m = 0;
  unsigned seg_len = 1;
  std::size_t k = 1;
  std::size_t h = 1;  // channels, ceil(k^1.5)
  double eps = 1.0;
  double eps1 = 0.5;  // full-value share in the split variant
  double eps2 = 0.5;  // channel share in the split variant
  std::uint64_t channel_seed = 0;
  std::uint64_t query_limit = std::uint64_t{1} << 20;
  BaselineVariant variant = BaselineVariant::kSplit;
  double final_user_fraction = 0.0;

  unsigned segments() const noexcept { return seg_len ? m / seg_len : 0; }
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

std::size_t mcm_channels(std::size_t k);

// h = ceil(k^1.5) and the longest segment length dividing m that fits.
McmConfig mcm_plan(unsigned m, std::size_t k, std::uint64_t query_limit,
                   PrivacyBudget eps, BaselineVariant variant = BaselineVariant::kSplit,
                   double final_user_fraction = 0.1,
                   std::uint64_t channel_seed = 0x6d636d);

// Channel of a value in [0, h).
std::size_t mcm_channel(const BitValue& v, std::size_t h,
                        std::uint64_t channel_seed);

struct McmReport {
  std::optional<OlhReport> full;
  unsigned seg_index = 0;
  std::vector<OlhReport> payloads;  // one per channel
};

// An identification user's report; `full` is set only in the split variant.
McmReport mcm_client_report(const BitValue& v, const McmConfig& cfg, Rng& rng);

RunResult mcm_run(const Dataset& data, const McmConfig& cfg,
                  std::uint64_t master_seed);

}  // namespace ldphh

#endif  // LDPHH_BASELINES_HPP_
