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

#include "ldphh/pem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ldphh/error.hpp"

namespace ldphh {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul_pow2(std::uint64_t x, unsigned bits) {
  if (x == 0) return 0;
  if (bits >= 64 || x > (kSaturated >> bits)) return kSaturated;
  return x << bits;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::vector<BitValue> all_strings(unsigned bits) {
  std::vector<BitValue> out;
  out.reserve(std::size_t{1} << bits);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << bits); ++x) {
    out.push_back(BitValue::from_uint(x, bits));
  }
  return out;
}

// Indices of the top `keep` entries by (count desc, value asc).
std::vector<std::size_t> top_indices(std::span<const std::uint64_t> counts,
                                     std::span<const BitValue> values,
                                     std::size_t keep) {
  std::vector<std::size_t> idx(counts.size());
  std::iota(idx.begin(), idx.end(), 0);
  keep = std::min(keep, idx.size());
  auto before = [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return values[a] < values[b];
  };
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(), before);
  idx.resize(keep);
  return idx;
}

template <typename Sink>
void for_each_report(const Dataset& data, const PemConfig& cfg,
                     const std::vector<RoundPlan>& rounds, const OlhParams& params,
                     std::uint64_t master_seed, Sink&& sink) {
  const std::uint64_t group_seed = derive_seed(master_seed, Stream::kGroupAssignment);
  const std::uint64_t perturb_seed = derive_seed(master_seed, Stream::kPerturbation);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const unsigned group = cfg.user_shares.empty()
                               ? assign_group(i, cfg.g, group_seed)
                               : assign_group(i, cfg.user_shares, group_seed);
    Rng rng(derive_seed(perturb_seed, i));
    const BitValue prefix = data.values[i].prefix(rounds[group - 1].prefix_bits);
    sink(group, olh_perturb(prefix, params, rng));
  }
}

RunResult simulate(const Dataset& data, const PemConfig& cfg,
                   std::uint64_t master_seed, std::optional<double> theta) {
  cfg.validate();
  if (data.m != cfg.m) {
    throw InvalidArgument("dataset has " + std::to_string(data.m) +
                          "-bit values, config expects " + std::to_string(cfg.m));
  }
  const auto rounds = cfg.rounds();
  const PrivacyBudget eps(cfg.eps);
  const OlhParams params = OlhParams::make(eps);

  std::vector<ReportBatch> batches(cfg.g, ReportBatch(params.d_prime));
  for_each_report(data, cfg, rounds, params, master_seed,
                  [&](unsigned group, const OlhReport& r) { batches[group - 1].add(r); });

  RunResult out;
  out.protocol = "pem";
  out.variant = theta ? "threshold" : "topk";
  out.config = cfg.to_json();
  if (theta) out.config["theta"] = *theta;
  out.seed = master_seed;

  std::vector<BitValue> domain = all_strings(rounds[0].prefix_bits);
  for (unsigned r = 0; r < cfg.g; ++r) {
    out.queries_used += domain.size();
    out.rounds.push_back(
        identify_round(batches[r], domain, rounds[r].cand_size, eps, r + 1));
    if (r + 1 < cfg.g) {
      domain = extend_candidates(out.rounds.back().prefixes,
                                 rounds[r + 1].extension, cfg.m);
    }
  }

  const CandidateSet& last = out.rounds.back();
  const double n_g = static_cast<double>(batches.back().size());
  const double scale = n_g > 0 ? static_cast<double>(data.n()) / n_g : 0.0;
  for (std::size_t c = 0; c < last.prefixes.size(); ++c) {
    if (theta && !(n_g > 0 && last.estimates[c] / n_g > *theta)) continue;
    out.identified.push_back({last.prefixes[c], last.estimates[c] * scale});
  }
  return out;
}

}  // namespace

PemConfig PemConfig::uniform(unsigned m, std::size_t k, unsigned eta,
                             std::uint64_t query_limit, double eps) {
  if (m == 0) throw InvalidArgument("values need at least 1 bit");
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (eta == 0) throw InvalidArgument("eta must be at least 1");
  PemConfig cfg;
  cfg.m = m;
  cfg.k = k;
  cfg.cand_size = k;
  cfg.gamma = initial_prefix_bits(m, k);
  cfg.eta = eta;
  cfg.g = (m - cfg.gamma + eta - 1) / eta;
  cfg.query_limit = query_limit;
  cfg.eps = eps;
  return cfg;
}

std::vector<RoundPlan> PemConfig::rounds() const {
  if (m == 0 || m > BitValue::kMaxBits) {
    throw InvalidArgument("m must be in [1, " + std::to_string(BitValue::kMaxBits) + "]");
  }
  if (gamma >= m) throw InvalidArgument("gamma must be below m");
  if (g == 0) throw InvalidArgument("g must be at least 1");
  if (k == 0 || cand_size == 0) throw InvalidArgument("k and cand_size must be at least 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be positive");
  auto check_len = [&](std::size_t len, const char* what) {
    if (len != 0 && len != g) {
      throw InvalidArgument(std::string(what) + " has " + std::to_string(len) +
                            " entries for " + std::to_string(g) + " rounds");
    }
  };
  check_len(etas.size(), "etas");
  check_len(cand_sizes.size(), "cand_sizes");
  check_len(user_shares.size(), "user_shares");

  std::vector<unsigned> ext(g);
  if (etas.empty()) {
    if (eta == 0) throw InvalidArgument("eta must be at least 1");
    if (g != (m - gamma + eta - 1) / eta) {
      throw InvalidArgument("g must equal ceil((m - gamma) / eta)");
    }
    for (unsigned i = 0; i < g; ++i) ext[i] = std::min(eta, m - gamma - i * eta);
  } else {
    unsigned total = 0;
    for (unsigned i = 0; i < g; ++i) {
      if (etas[i] == 0) throw InvalidArgument("every round must extend by at least 1 bit");
      total += etas[i];
      ext[i] = etas[i];
    }
    if (total != m - gamma) throw InvalidArgument("etas must sum to m - gamma");
  }
  if (!user_shares.empty()) {
    double total = 0.0;
    for (double s : user_shares) {
      if (!(s > 0.0)) throw InvalidArgument("user shares must be positive");
      total += s;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("user shares must sum to 1");
  }

  std::vector<RoundPlan> out(g);
  unsigned bits = gamma;
  for (unsigned i = 0; i < g; ++i) {
    bits += ext[i];
    out[i].prefix_bits = bits;
    out[i].extension = ext[i];
    out[i].cand_size = cand_sizes.empty() ? cand_size : cand_sizes[i];
    if (out[i].cand_size == 0) throw InvalidArgument("cand_size must be at least 1");
    out[i].user_share = user_shares.empty() ? 1.0 / g : user_shares[i];
  }
  return out;
}

std::vector<std::uint64_t> PemConfig::domain_sizes() const {
  const auto plan = rounds();
  std::vector<std::uint64_t> out(plan.size());
  out[0] = sat_mul_pow2(1, plan[0].prefix_bits);
  for (std::size_t i = 1; i < plan.size(); ++i) {
    const std::uint64_t kept = std::min<std::uint64_t>(plan[i - 1].cand_size, out[i - 1]);
    out[i] = sat_mul_pow2(kept, plan[i].extension);
  }
  return out;
}

std::uint64_t PemConfig::total_queries() const {
  std::uint64_t total = 0;
  for (std::uint64_t d : domain_sizes()) total = sat_add(total, d);
  return total;
}

void PemConfig::validate() const {
  const std::uint64_t queries = total_queries();
  if (queries > query_limit) {
    throw Infeasible("plan needs " + std::to_string(queries) +
                     " queries, limit is " + std::to_string(query_limit));
  }
}

nlohmann::ordered_json PemConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["gamma"] = gamma;
  j["eta"] = eta;
  j["g"] = g;
  j["k"] = k;
  j["eps"] = eps;
  j["query_limit"] = query_limit;
  j["cand_size"] = cand_size;
  if (!etas.empty()) j["etas"] = etas;
  if (!cand_sizes.empty()) j["cand_sizes"] = cand_sizes;
  if (!user_shares.empty()) j["user_shares"] = user_shares;
  return j;
}

unsigned initial_prefix_bits(unsigned m, std::size_t k) {
  if (m == 0) throw InvalidArgument("values need at least 1 bit");
  if (k == 0) throw InvalidArgument("k must be at least 1");
  const auto gamma = static_cast<unsigned>(std::bit_width(k - 1));
  return std::min(gamma, m - 1);
}

PemConfig plan(unsigned m, std::size_t k, std::uint64_t query_limit,
               PrivacyBudget eps) {
  const unsigned gamma = initial_prefix_bits(m, k);
  std::optional<PemConfig> best;
  for (unsigned eta = 1; eta <= m - gamma; ++eta) {
    PemConfig cfg = PemConfig::uniform(m, k, eta, query_limit, eps.epsilon());
    // 2^(gamma+eta) g bounds the exact total since k <= 2^gamma.
    if (sat_mul_pow2(cfg.g, gamma + eta) <= query_limit) best = cfg;
  }
  if (!best) {
    throw Infeasible("no eta >= 1 fits " + std::to_string(query_limit) +
                     " queries for m=" + std::to_string(m) +
                     ", k=" + std::to_string(k));
  }
  return *best;
}

unsigned assign_group(std::uint64_t user_index, unsigned g,
                      std::uint64_t master_seed) {
  if (g == 0) throw InvalidArgument("g must be at least 1");
  Rng rng(derive_seed(master_seed, user_index));
  return static_cast<unsigned>(rng.uniform(g)) + 1;
}

unsigned assign_group(std::uint64_t user_index, std::span<const double> shares,
                      std::uint64_t master_seed) {
  if (shares.empty()) throw InvalidArgument("no group shares");
  Rng rng(derive_seed(master_seed, user_index));
  double u = rng.unit();
  for (std::size_t i = 0; i + 1 < shares.size(); ++i) {
    if (u < shares[i]) return static_cast<unsigned>(i) + 1;
    u -= shares[i];
  }
  return static_cast<unsigned>(shares.size());
}

PemReport client_report(const BitValue& v, unsigned group,
                        const PemConfig& cfg, Rng& rng) {
  if (v.size() != cfg.m) throw InvalidArgument("value length differs from m");
  const auto plan = cfg.rounds();
  if (group < 1 || group > plan.size()) {
    throw InvalidArgument("group " + std::to_string(group) + " outside [1, " +
                          std::to_string(plan.size()) + "]");
  }
  return {group, olh_perturb(v.prefix(plan[group - 1].prefix_bits),
                             PrivacyBudget(cfg.eps), rng)};
}

std::vector<BitValue> extend_candidates(std::span<const BitValue> prev,
                                        unsigned eta, unsigned m) {
  std::vector<BitValue> out;
  if (prev.empty()) return out;
  const unsigned len = prev.front().size();
  if (len >= m) throw InvalidArgument("candidates are already m bits long");
  const unsigned bits = std::min(eta, m - len);
  if (bits >= 32) throw InvalidArgument("extension of 2^32 or more patterns");
  const std::uint64_t patterns = std::uint64_t{1} << bits;
  out.reserve(prev.size() * patterns);
  for (const auto& p : prev) {
    if (p.size() != len) throw InvalidArgument("candidates differ in length");
    for (std::uint64_t x = 0; x < patterns; ++x) out.push_back(p.append(x, bits));
  }
  return out;
}

CandidateSet identify_round(const ReportBatch& batch,
                            std::span<const BitValue> domain,
                            std::size_t cand_size, PrivacyBudget eps,
                            unsigned round) {
  if (domain.empty()) throw InvalidArgument("empty candidate domain");
  const OlhParams params = OlhParams::make(eps);
  if (params.d_prime != batch.d_prime()) {
    throw InvalidArgument("report batch was built for a different budget");
  }
  std::vector<std::uint64_t> keys(domain.size());
  std::transform(domain.begin(), domain.end(), keys.begin(),
                 [](const BitValue& v) { return v.key(); });
  std::vector<std::uint64_t> counts(domain.size(), 0);
  count_supports(batch, keys, counts);

  CandidateSet out;
  out.round = round;
  const double n = static_cast<double>(batch.size());
  for (std::size_t i : top_indices(counts, domain, cand_size)) {
    out.prefixes.push_back(domain[i]);
    out.estimates.push_back(olh_estimate(static_cast<double>(counts[i]), n, params));
  }
  return out;
}

CandidateSet identify_round(std::span<const PemReport> reports,
                            std::span<const BitValue> domain,
                            std::size_t cand_size, PrivacyBudget eps,
                            unsigned round) {
  ReportBatch batch(OlhParams::make(eps).d_prime);
  batch.reserve(reports.size());
  for (const auto& r : reports) batch.add(r.inner);
  return identify_round(batch, domain, cand_size, eps, round);
}

std::vector<ReportRecord> pem_reports(const Dataset& data, const PemConfig& cfg,
                                     std::uint64_t master_seed) {
  cfg.validate();
  if (data.m != cfg.m) throw InvalidArgument("dataset width differs from m");
  std::vector<ReportRecord> out;
  out.reserve(data.n());
  for_each_report(data, cfg, cfg.rounds(), OlhParams::make(PrivacyBudget(cfg.eps)),
                  master_seed, [&](unsigned group, const OlhReport& r) {
                    out.push_back({group, r});
                  });
  return out;
}

RunResult run_topk(const Dataset& data, const PemConfig& cfg,
                   std::uint64_t master_seed) {
  return simulate(data, cfg, master_seed, std::nullopt);
}

RunResult run_threshold(const Dataset& data, const PemConfig& cfg, double theta,
                        std::uint64_t master_seed) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must be in (0, 1)");
  const auto k_eff = static_cast<std::size_t>(std::ceil(1.0 / theta));
  PemConfig adjusted = cfg;
  const auto plan = cfg.rounds();
  adjusted.cand_sizes.resize(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    adjusted.cand_sizes[i] = std::min(k_eff, plan[i].cand_size);
  }
  return simulate(data, adjusted, master_seed, theta);
}

}  // namespace ldphh
