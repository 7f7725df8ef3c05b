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

#ifndef LDPHH_PEM_HPP_
#define LDPHH_PEM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ldphh/bit_value.hpp"
#include "ldphh/datagen.hpp"
#include "ldphh/freq_oracle.hpp"
#include "ldphh/random.hpp"
#include "ldphh/run_result.hpp"

namespace ldphh {

// One identification round as executed.
struct RoundPlan {
  unsigned prefix_bits = 0;  // prefix length reported by this round's group
  unsigned extension = 0;    // bits added over the previous round
  std::size_t cand_size = 0;
  double user_share = 0.0;
};

struct PemConfig {
  unsigned m = 0;
  unsigned gamma = 0;
  unsigned eta = 1;
  unsigned g = 1;
  std::size_t k = 1;
  std::size_t cand_size = 1;
  std::uint64_t query_limit = std::uint64_t{1} << 20;
  double eps = 1.0;

  // Per-round overrides; each is either empty or has g entries. etas must
  // sum to m - gamma and user_shares to 1.
  std::vector<unsigned> etas;
  std::vector<std::size_t> cand_sizes;
  std::vector<double> user_shares;

  // Uniform config with gamma = ceil(log2 k), cand_size = k and
  // g = ceil((m - gamma) / eta); the last round is clipped at m bits.
  static PemConfig uniform(unsigned m, std::size_t k, unsigned eta,
                           std::uint64_t query_limit, double eps);

  // Throws InvalidArgument on a malformed shape.
  std::vector<RoundPlan> rounds() const;
  // |D_i| for every round; saturates at UINT64_MAX.
  std::vector<std::uint64_t> domain_sizes() const;
  std::uint64_t total_queries() const;
  // Shape checks, then Infeasible when total_queries() > query_limit.
  void validate() const;

  nlohmann::ordered_json to_json() const;
};

// ceil(log2 k), kept below m.
unsigned initial_prefix_bits(unsigned m, std::size_t k);

// The largest eta whose uniform plan fits the query limit.
PemConfig plan(unsigned m, std::size_t k, std::uint64_t query_limit,
               PrivacyBudget eps);

// Group in {1..g}, uniform or weighted by `shares`, from the user's own
// stream of `master_seed`.
unsigned assign_group(std::uint64_t user_index, unsigned g,
                      std::uint64_t master_seed);
unsigned assign_group(std::uint64_t user_index, std::span<const double> shares,
                      std::uint64_t master_seed);

struct PemReport {
  unsigned group = 1;
  OlhReport inner;
};

PemReport client_report(const BitValue& v, unsigned group,
                        const PemConfig& cfg, Rng& rng);

// Every prefix followed by every pattern of min(eta, m - length) bits.
std::vector<BitValue> extend_candidates(std::span<const BitValue> prev,
                                        unsigned eta, unsigned m);

// Aggregates `batch` over `domain` and keeps the top cand_size.
CandidateSet identify_round(const ReportBatch& batch,
                            std::span<const BitValue> domain,
                            std::size_t cand_size, PrivacyBudget eps,
                            unsigned round = 1);
CandidateSet identify_round(std::span<const PemReport> reports,
                            std::span<const BitValue> domain,
                            std::size_t cand_size, PrivacyBudget eps,
                            unsigned round = 1);

// The reports a run with this seed aggregates, in user order.
std::vector<ReportRecord> pem_reports(const Dataset& data, const PemConfig& cfg,
                                      std::uint64_t master_seed);

RunResult run_topk(const Dataset& data, const PemConfig& cfg,
                   std::uint64_t master_seed);
// Keeps the final candidates whose estimated frequency exceeds theta;
// intermediate rounds keep min(ceil(1/theta), |C_i|) candidates.
RunResult run_threshold(const Dataset& data, const PemConfig& cfg, double theta,
                        std::uint64_t master_seed);

}  // namespace ldphh

#endif  // LDPHH_PEM_HPP_
