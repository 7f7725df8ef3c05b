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

#ifndef LDPHH_FREQ_ORACLE_HPP_
#define LDPHH_FREQ_ORACLE_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "ldphh/bit_value.hpp"
#include "ldphh/random.hpp"

namespace ldphh {

// Privacy parameter epsilon in nats; always positive and finite.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon);
  double epsilon() const noexcept { return epsilon_; }
  double exp() const noexcept;
  // This budget divided into `parts` equal shares.
  PrivacyBudget split(unsigned parts) const;

 private:
  double epsilon_;
};

// Generalized randomized response on a domain of size d.
struct GrrParams {
  std::uint32_t d = 2;
  double p = 0.0;  // keep probability e^eps / (e^eps + d - 1)
  double q = 0.0;  // probability of each other value, (1 - p) / (d - 1)

  static GrrParams make(std::uint32_t d, PrivacyBudget eps);
};

// Optimized local hashing. q here is the support probability of a report
// from a user not holding the queried value, i.e. 1/d'.
struct OlhParams {
  double epsilon = 0.0;
  std::uint32_t d_prime = 2;  // ceil(e^eps + 1)
  double p = 0.0;             // e^eps / (e^eps + d' - 1)
  double q = 0.0;             // 1 / d'

  static OlhParams make(PrivacyBudget eps);
  // Randomized response over the d' buckets.
  GrrParams bucket_grr() const;
};

struct HashSeed {
  std::uint64_t value = 0;
  friend auto operator<=>(const HashSeed&, const HashSeed&) = default;
};

// <H, GRR(H(v))>; y is a bucket in [1, d'].
struct OlhReport {
  HashSeed seed;
  std::uint32_t y = 1;
  friend bool operator==(const OlhReport&, const OlhReport&) = default;
};

// Returns v with probability p and each other value with probability q.
std::uint32_t grr_perturb(std::uint32_t v, const GrrParams& params, Rng& rng);
// (I_v - n q) / (p - q) where I_v counts reports equal to v.
double grr_estimate(std::span<const std::uint32_t> reports, std::uint32_t v,
                    const GrrParams& params);
// n (d - 2 + e^eps) / (e^eps - 1)^2
double grr_variance(double n, std::uint32_t d, PrivacyBudget eps);

// Bucket of v under hash-family member `seed`, in [1, d_prime].
std::uint32_t olh_hash(HashSeed seed, const BitValue& v, std::uint32_t d_prime);
OlhReport olh_perturb(const BitValue& v, const OlhParams& params, Rng& rng);
OlhReport olh_perturb(const BitValue& v, PrivacyBudget eps, Rng& rng);

// Support counts I_v for a list of candidates over n reports.
class SupportCounts {
 public:
  SupportCounts() = default;
  SupportCounts(std::vector<BitValue> candidates,
                std::vector<std::uint64_t> counts, std::uint64_t n);

  std::uint64_t n() const noexcept { return n_; }
  std::span<const BitValue> candidates() const noexcept { return candidates_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  bool contains(const BitValue& v) const { return index_.contains(v); }
  // Throws InvalidArgument for a value that was not aggregated.
  std::uint64_t at(const BitValue& v) const;

  // Adds the supports of a disjoint report batch over the same candidates.
  SupportCounts& merge(const SupportCounts& other);

 private:
  std::vector<BitValue> candidates_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<BitValue, std::size_t> index_;
  std::uint64_t n_ = 0;
};

SupportCounts olh_aggregate(std::span<const OlhReport> reports,
                            std::span<const BitValue> candidates,
                            PrivacyBudget eps);
// (I_v - n/d') / (p - 1/d')
double olh_estimate(const SupportCounts& supports, const BitValue& v,
                    PrivacyBudget eps);
double olh_estimate(double support, double n, const OlhParams& params);
// n 4 e^eps / (e^eps - 1)^2
double olh_variance(double n, PrivacyBudget eps);

// Reports in the layout consumed by count_supports. A report supports
// candidate v iff mix64(seed_key ^ key(v)) falls in the half-open interval
// of 64-bit hash values that reduce_range() maps to the reported bucket, so
// each report keeps that interval as (lower bound, width).
class ReportBatch {
 public:
  explicit ReportBatch(std::uint32_t d_prime);
  std::uint32_t d_prime() const noexcept { return d_prime_; }
  void reserve(std::size_t n);
  // Throws InvalidArgument when the bucket is outside [1, d'].
  void add(const OlhReport& report);
  std::size_t size() const noexcept { return seed_keys_.size(); }
  std::span<const std::uint64_t> seed_keys() const noexcept { return seed_keys_; }
  std::span<const std::uint64_t> lower() const noexcept { return lower_; }
  std::span<const std::uint64_t> width() const noexcept { return width_; }

 private:
  std::uint32_t d_prime_;
  std::vector<std::uint64_t> seed_keys_;
  std::vector<std::uint64_t> lower_;
  std::vector<std::uint64_t> width_;
};

// out[c] += number of reports in `batch` supporting candidate c, given by
// its BitValue::key().
void count_supports(const ReportBatch& batch,
                    std::span<const std::uint64_t> candidate_keys,
                    std::span<std::uint64_t> out);

// Per-report support indicators of one candidate.
std::vector<std::uint8_t> support_mask(const ReportBatch& batch,
                                       std::uint64_t candidate_key);

// Largest Pr[o | v1] / Pr[o | v2] over all inputs and outputs, from the
// exact output distribution of GRR on its whole domain.
double ldp_ratio(const GrrParams& params);
// Same for OLH with the hash member fixed, maximized over `seeds`. Inputs
// are the integers [0, d) written with ceil(log2 d) bits.
double ldp_ratio(const OlhParams& params, std::uint32_t d,
                 std::span<const HashSeed> seeds);

// One line of the report exchange format: `group,seed,y`.
struct ReportRecord {
  std::uint32_t group = 0;
  OlhReport report;
  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

void write_reports_csv(std::ostream& out, std::span<const ReportRecord> records);
// Throws InvalidArgument naming the line of a malformed record.
std::vector<ReportRecord> read_reports_csv(std::istream& in);

}  // namespace ldphh

#endif  // LDPHH_FREQ_ORACLE_HPP_
