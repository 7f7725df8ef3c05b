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

#include "ldphh/freq_oracle.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "ldphh/error.hpp"
#include "ldphh/hashing.hpp"

namespace ldphh {

PrivacyBudget::PrivacyBudget(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("privacy budget must be positive and finite, got " +
                          std::to_string(epsilon));
  }
}

double PrivacyBudget::exp() const noexcept { return std::exp(epsilon_); }

PrivacyBudget PrivacyBudget::split(unsigned parts) const {
  if (parts == 0) throw InvalidArgument("cannot split a budget into 0 parts");
  return PrivacyBudget(epsilon_ / parts);
}

GrrParams GrrParams::make(std::uint32_t d, PrivacyBudget eps) {
  if (d < 2) throw InvalidArgument("GRR domain size must be at least 2");
  const double e = eps.exp();
  GrrParams out;
  out.d = d;
  out.p = e / (e + d - 1);
  out.q = 1.0 / (e + d - 1);
  return out;
}

OlhParams OlhParams::make(PrivacyBudget eps) {
  const double e = eps.exp();
  OlhParams out;
  out.epsilon = eps.epsilon();
  // The slack keeps e.g. eps = ln 3 at d' = 4 despite exp() rounding up.
  out.d_prime = static_cast<std::uint32_t>(std::ceil(e + 1.0 - 1e-9));
  out.p = e / (e + out.d_prime - 1);
  out.q = 1.0 / out.d_prime;
  return out;
}

GrrParams OlhParams::bucket_grr() const {
  return GrrParams::make(d_prime, PrivacyBudget(epsilon));
}

std::uint32_t grr_perturb(std::uint32_t v, const GrrParams& params, Rng& rng) {
  if (v >= params.d) {
    throw InvalidArgument("GRR input " + std::to_string(v) +
                          " outside domain of size " + std::to_string(params.d));
  }
  if (rng.bernoulli(params.p)) return v;
  auto other = static_cast<std::uint32_t>(rng.uniform(params.d - 1));
  return other >= v ? other + 1 : other;
}

double grr_estimate(std::span<const std::uint32_t> reports, std::uint32_t v,
                    const GrrParams& params) {
  std::uint64_t support = 0;
  for (std::uint32_t r : reports) {
    if (r >= params.d) throw InvalidArgument("GRR report outside domain");
    support += (r == v);
  }
  const double n = static_cast<double>(reports.size());
  return (static_cast<double>(support) - n * params.q) / (params.p - params.q);
}

double grr_variance(double n, std::uint32_t d, PrivacyBudget eps) {
  const double e = eps.exp();
  const double em1 = std::expm1(eps.epsilon());
  return n * (d - 2.0 + e) / (em1 * em1);
}

std::uint32_t olh_hash(HashSeed seed, const BitValue& v, std::uint32_t d_prime) {
  if (d_prime < 2) throw InvalidArgument("hashed domain must have at least 2 buckets");
  return static_cast<std::uint32_t>(
             bucket_of(seed_key(seed.value), v.key(), d_prime)) + 1;
}

OlhReport olh_perturb(const BitValue& v, const OlhParams& params, Rng& rng) {
  OlhReport out;
  out.seed = HashSeed{rng()};
  const std::uint32_t bucket = olh_hash(out.seed, v, params.d_prime) - 1;
  // GRR over the buckets: keep with p, else a uniform other bucket.
  if (rng.bernoulli(params.p)) {
    out.y = bucket + 1;
  } else {
    auto other = static_cast<std::uint32_t>(rng.uniform(params.d_prime - 1));
    out.y = (other >= bucket ? other + 1 : other) + 1;
  }
  return out;
}

OlhReport olh_perturb(const BitValue& v, PrivacyBudget eps, Rng& rng) {
  return olh_perturb(v, OlhParams::make(eps), rng);
}

SupportCounts::SupportCounts(std::vector<BitValue> candidates,
                             std::vector<std::uint64_t> counts, std::uint64_t n)
    : candidates_(std::move(candidates)), counts_(std::move(counts)), n_(n) {
  if (candidates_.size() != counts_.size()) {
    throw InvalidArgument("support counts and candidates differ in length");
  }
  index_.reserve(candidates_.size());
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (counts_[i] > n_) throw InvalidArgument("support exceeds report count");
    if (!index_.emplace(candidates_[i], i).second) {
      throw InvalidArgument("duplicate candidate " + candidates_[i].to_binary());
    }
  }
}

std::uint64_t SupportCounts::at(const BitValue& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw InvalidArgument("candidate " + v.to_binary() + " was not aggregated");
  }
  return counts_[it->second];
}

SupportCounts& SupportCounts::merge(const SupportCounts& other) {
  if (other.candidates_ != candidates_) {
    throw InvalidArgument("merging support counts over different candidates");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  n_ += other.n_;
  return *this;
}

SupportCounts olh_aggregate(std::span<const OlhReport> reports,
                            std::span<const BitValue> candidates,
                            PrivacyBudget eps) {
  if (candidates.empty()) throw InvalidArgument("no candidates to aggregate");
  const OlhParams params = OlhParams::make(eps);
  ReportBatch batch(params.d_prime);
  batch.reserve(reports.size());
  for (const auto& r : reports) batch.add(r);
  std::vector<std::uint64_t> keys(candidates.size());
  std::transform(candidates.begin(), candidates.end(), keys.begin(),
                 [](const BitValue& v) { return v.key(); });
  std::vector<std::uint64_t> counts(candidates.size(), 0);
  count_supports(batch, keys, counts);
  return SupportCounts({candidates.begin(), candidates.end()}, std::move(counts),
                       reports.size());
}

double olh_estimate(double support, double n, const OlhParams& params) {
  return (support - n * params.q) / (params.p - params.q);
}

double olh_estimate(const SupportCounts& supports, const BitValue& v,
                    PrivacyBudget eps) {
  return olh_estimate(static_cast<double>(supports.at(v)),
                      static_cast<double>(supports.n()), OlhParams::make(eps));
}

double olh_variance(double n, PrivacyBudget eps) {
  const double em1 = std::expm1(eps.epsilon());
  return n * 4.0 * eps.exp() / (em1 * em1);
}

ReportBatch::ReportBatch(std::uint32_t d_prime) : d_prime_(d_prime) {
  if (d_prime < 2) throw InvalidArgument("hashed domain must have at least 2 buckets");
}

void ReportBatch::reserve(std::size_t n) {
  seed_keys_.reserve(n);
  lower_.reserve(n);
  width_.reserve(n);
}

namespace {

// Smallest 64-bit x with reduce_range(x, d) >= y, i.e. ceil(y 2^64 / d).
unsigned __int128 bucket_floor(std::uint64_t y, std::uint64_t d) {
  return ((static_cast<unsigned __int128>(y) << 64) + d - 1) / d;
}

}  // namespace

void ReportBatch::add(const OlhReport& report) {
  if (report.y < 1 || report.y > d_prime_) {
    throw InvalidArgument("report bucket " + std::to_string(report.y) +
                          " outside [1, " + std::to_string(d_prime_) + "]");
  }
  const std::uint64_t y = report.y - 1;
  const unsigned __int128 lo = bucket_floor(y, d_prime_);
  const unsigned __int128 hi = bucket_floor(y + 1, d_prime_);
  seed_keys_.push_back(seed_key(report.seed.value));
  lower_.push_back(static_cast<std::uint64_t>(lo));
  width_.push_back(static_cast<std::uint64_t>(hi - lo));
}

void count_supports(const ReportBatch& batch,
                    std::span<const std::uint64_t> candidate_keys,
                    std::span<std::uint64_t> out) {
  if (out.size() != candidate_keys.size()) {
    throw InvalidArgument("output span does not match candidate count");
  }
  const std::size_t n = batch.size();
  // Blocks of reports stay cache resident while every candidate is scored.
  constexpr std::size_t kBlock = 2048;
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t len = std::min(kBlock, n - start);
    const std::uint64_t* sk = batch.seed_keys().data() + start;
    const std::uint64_t* lo = batch.lower().data() + start;
    const std::uint64_t* wd = batch.width().data() + start;
    for (std::size_t c = 0; c < candidate_keys.size(); ++c) {
      const std::uint64_t key = candidate_keys[c];
      std::uint64_t acc = 0;
      for (std::size_t r = 0; r < len; ++r) {
        acc += static_cast<std::uint64_t>(mix64(sk[r] ^ key) - lo[r] < wd[r]);
      }
      out[c] += acc;
    }
  }
}

std::vector<std::uint8_t> support_mask(const ReportBatch& batch,
                                       std::uint64_t candidate_key) {
  std::vector<std::uint8_t> out(batch.size());
  const auto sk = batch.seed_keys();
  const auto lo = batch.lower();
  const auto wd = batch.width();
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = mix64(sk[r] ^ candidate_key) - lo[r] < wd[r];
  }
  return out;
}

namespace {

// max over columns of (column max / column min) of a row-major table.
double max_column_ratio(const std::vector<double>& table, std::size_t rows,
                        std::size_t cols) {
  double worst = 1.0;
  for (std::size_t o = 0; o < cols; ++o) {
    double hi = table[o];
    double lo = table[o];
    for (std::size_t v = 1; v < rows; ++v) {
      hi = std::max(hi, table[v * cols + o]);
      lo = std::min(lo, table[v * cols + o]);
    }
    worst = std::max(worst, hi / lo);
  }
  return worst;
}

}  // namespace

double ldp_ratio(const GrrParams& params) {
  const std::size_t d = params.d;
  // Off-diagonal mass derived from p alone, independently of params.q.
  const double other = (1.0 - params.p) / static_cast<double>(d - 1);
  std::vector<double> table(d * d, other);
  for (std::size_t v = 0; v < d; ++v) table[v * d + v] = params.p;
  return max_column_ratio(table, d, d);
}

double ldp_ratio(const OlhParams& params, std::uint32_t d,
                 std::span<const HashSeed> seeds) {
  if (d < 2) throw InvalidArgument("ratio needs at least two inputs");
  const unsigned bits = std::bit_width(d - 1);
  const std::size_t cols = params.d_prime;
  const double other = (1.0 - params.p) / static_cast<double>(cols - 1);
  double worst = 1.0;
  std::vector<double> table(static_cast<std::size_t>(d) * cols);
  for (HashSeed seed : seeds) {
    std::fill(table.begin(), table.end(), other);
    for (std::uint32_t v = 0; v < d; ++v) {
      const std::uint32_t y = olh_hash(seed, BitValue::from_uint(v, bits), params.d_prime);
      table[static_cast<std::size_t>(v) * cols + (y - 1)] = params.p;
    }
    worst = std::max(worst, max_column_ratio(table, d, cols));
  }
  return worst;
}

void write_reports_csv(std::ostream& out, std::span<const ReportRecord> records) {
  out << "group,seed,y\n";
  for (const auto& r : records) {
    out << r.group << ',' << r.report.seed.value << ',' << r.report.y << '\n';
  }
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("malformed report on line " + std::to_string(line) +
                          ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<ReportRecord> read_reports_csv(std::istream& in) {
  std::vector<ReportRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "group,seed,y") continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InvalidArgument("malformed report on line " + std::to_string(lineno) +
                            ": expected group,seed,y");
    }
    const std::string_view view(line);
    ReportRecord r;
    r.group = parse_field<std::uint32_t>(view.substr(0, c1), lineno);
    r.report.seed.value = parse_field<std::uint64_t>(view.substr(c1 + 1, c2 - c1 - 1), lineno);
    r.report.y = parse_field<std::uint32_t>(view.substr(c2 + 1), lineno);
    if (r.report.y == 0) {
      throw InvalidArgument("report bucket must be >= 1 on line " + std::to_string(lineno));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace ldphh
