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

#ifndef LDPHH_ANALYSIS_HPP_
#define LDPHH_ANALYSIS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "ldphh/distribution.hpp"
#include "ldphh/freq_oracle.hpp"
#include "ldphh/pem.hpp"

namespace ldphh {

double normal_cdf(double x);
// Throws InvalidArgument unless 0 < p < 1.
double normal_inv_cdf(double p);

// Normal approximation of one round's support counts.
struct RoundStats {
  double n_i = 0.0;
  double p = 0.0;
  double q = 0.0;
  double f = 0.0;      // frequency of the tracked value
  double N = 0.0;      // number of non-heavy candidates |D_i| - k

  static RoundStats make(double n_i, const OlhParams& params, double f,
                         double N);

  double p_j() const noexcept { return p * f + q * (1.0 - f); }
  double mu_j() const noexcept { return n_i * p_j(); }
  double sigma_j() const;
  double mu_0() const noexcept { return n_i * q; }
  double sigma_0() const;
};

// Support above which a noise candidate takes one of `slots` places;
// slots/N is clamped to [1/(2N), 1 - 1/(2N)].
double rank_threshold(const RoundStats& stats, double slots);
// Probability that the j-th heavy hitter survives a round keeping k
// candidates.
double ident_prob(const RoundStats& stats, std::size_t j, std::size_t k);
// Same with `cand_size` places instead of k.
double ident_prob(const RoundStats& stats, std::size_t j, std::size_t k,
                  std::size_t cand_size);

struct WeightScheme {
  enum class Kind { kF1, kNcr };
  Kind kind = Kind::kF1;
  std::vector<double> w;  // w[j-1], sums to 1

  static WeightScheme f1(std::size_t k);
  static WeightScheme ncr(std::size_t k);
};

// Probability that the j-th value (j = 1..cfg.k) survives every round.
std::vector<double> ident_probs(const DistributionSpec& dist,
                                const PemConfig& cfg, double n);
double utility_score(const DistributionSpec& dist, const PemConfig& cfg,
                     const WeightScheme& weights, double n);

struct ValueProb {
  std::size_t rank = 0;
  double f = 0.0;
  double prob = 0.0;
};

struct AnalysisResult {
  PemConfig config;
  std::vector<ValueProb> per_value;
  double score_f1 = 0.0;
  double score_ncr = 0.0;
};

AnalysisResult analyze(const DistributionSpec& dist, const PemConfig& cfg,
                       double n);

// Enumerates eta (and, with vary_cand_size, |C_i| in {k, 2k, 4k}) under the
// exact query count; ties go to the smaller eta, then smaller |C_i|.
// Throws Infeasible when nothing fits.
PemConfig optimize(const DistributionSpec& dist, unsigned m, std::size_t k,
                   double n, PrivacyBudget eps, std::uint64_t query_limit,
                   const WeightScheme& weights, bool vary_cand_size = false);

// (e^x - 1)^2 / e^x.
double lemma_E(double x);
bool lemma_E_check(double eps, unsigned g);

struct SplitComparison {
  double p1 = 0.0;  // population split across g groups
  double p2 = 0.0;  // budget split into g shares
};

SplitComparison compare_partition_vs_split(double n_i, double f, std::size_t k,
                                           double N_i, double eps, unsigned g);

// Smallest n with f n >= multiple * sd * sqrt(n), sd^2 = 4e^eps/(e^eps-1)^2.
// sd is first rounded to `sd_decimals` places when given; nullopt keeps it
// exact.
std::uint64_t min_population(double f, PrivacyBudget eps, double multiple,
                             std::optional<int> sd_decimals = 1);

nlohmann::ordered_json to_json(const AnalysisResult& result);

}  // namespace ldphh

#endif  // LDPHH_ANALYSIS_HPP_
