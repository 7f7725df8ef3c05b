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

#include "ldphh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldphh/error.hpp"

namespace ldphh {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("inverse normal cdf needs 0 < p < 1, got " +
                          std::to_string(p));
  }
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double t = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double u = p - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  // One Newton step on Phi(x) = p.
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (density > 0.0) x -= (normal_cdf(x) - p) / density;
  return x;
}

RoundStats RoundStats::make(double n_i, const OlhParams& params, double f,
                            double N) {
  return {n_i, params.p, params.q, f, N};
}

double RoundStats::sigma_j() const {
  const double pj = p_j();
  return std::sqrt(n_i * pj * (1.0 - pj));
}

double RoundStats::sigma_0() const { return std::sqrt(n_i * q * (1.0 - q)); }

namespace {

double clamped_ratio(double slots, double N) {
  const double lo = 1.0 / (2.0 * N);
  return std::clamp(slots / N, lo, 1.0 - lo);
}

}  // namespace

double rank_threshold(const RoundStats& stats, double slots) {
  if (!(stats.N >= 1.0)) throw InvalidArgument("rank threshold needs N >= 1");
  return -normal_inv_cdf(clamped_ratio(slots, stats.N)) * stats.sigma_0() +
         stats.mu_0();
}

double ident_prob(const RoundStats& stats, std::size_t j, std::size_t k) {
  return ident_prob(stats, j, k, k);
}

double ident_prob(const RoundStats& stats, std::size_t j, std::size_t k,
                  std::size_t cand_size) {
  if (j < 1 || j > k) throw InvalidArgument("rank j must be in [1, k]");
  if (!(stats.N >= 1.0)) return 1.0;  // every candidate is kept
  const double slots = static_cast<double>(cand_size) - static_cast<double>(j);
  const double sigma = stats.sigma_j();
  if (!(sigma > 0.0)) return clamped_ratio(slots, stats.N);
  return normal_cdf((stats.mu_j() - rank_threshold(stats, slots)) / sigma);
}

WeightScheme WeightScheme::f1(std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  return {Kind::kF1, std::vector<double>(k, 1.0 / k)};
}

WeightScheme WeightScheme::ncr(std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  WeightScheme out{Kind::kNcr, std::vector<double>(k)};
  const double total = k * (k + 1) / 2.0;
  for (std::size_t j = 1; j <= k; ++j) out.w[j - 1] = (k + 1 - j) / total;
  return out;
}

std::vector<double> ident_probs(const DistributionSpec& dist,
                                const PemConfig& cfg, double n) {
  const auto plan = cfg.rounds();
  const auto sizes = cfg.domain_sizes();
  const OlhParams params = OlhParams::make(PrivacyBudget(cfg.eps));
  std::vector<double> out(cfg.k, 1.0);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (sizes[i] <= plan[i].cand_size) continue;
    const double N = static_cast<double>(sizes[i]) - static_cast<double>(cfg.k);
    for (std::size_t j = 1; j <= cfg.k; ++j) {
      const auto stats = RoundStats::make(n * plan[i].user_share, params, dist.f(j), N);
      out[j - 1] *= ident_prob(stats, j, cfg.k, plan[i].cand_size);
    }
  }
  return out;
}

double utility_score(const DistributionSpec& dist, const PemConfig& cfg,
                     const WeightScheme& weights, double n) {
  if (weights.w.size() != cfg.k) throw InvalidArgument("need one weight per rank");
  const auto probs = ident_probs(dist, cfg, n);
  double score = 0.0;
  for (std::size_t j = 0; j < cfg.k; ++j) score += weights.w[j] * probs[j];
  return score;
}

AnalysisResult analyze(const DistributionSpec& dist, const PemConfig& cfg,
                       double n) {
  AnalysisResult out;
  out.config = cfg;
  const auto probs = ident_probs(dist, cfg, n);
  const auto f1w = WeightScheme::f1(cfg.k);
  const auto ncrw = WeightScheme::ncr(cfg.k);
  for (std::size_t j = 1; j <= cfg.k; ++j) {
    out.per_value.push_back({j, dist.f(j), probs[j - 1]});
    out.score_f1 += f1w.w[j - 1] * probs[j - 1];
    out.score_ncr += ncrw.w[j - 1] * probs[j - 1];
  }
  return out;
}

PemConfig optimize(const DistributionSpec& dist, unsigned m, std::size_t k,
                   double n, PrivacyBudget eps, std::uint64_t query_limit,
                   const WeightScheme& weights, bool vary_cand_size) {
  const unsigned gamma = initial_prefix_bits(m, k);
  std::optional<PemConfig> best;
  double best_score = -1.0;
  const std::size_t multipliers[] = {1, 2, 4};
  for (unsigned eta = 1; eta <= m - gamma; ++eta) {
    for (std::size_t mult : multipliers) {
      if (mult > 1 && !vary_cand_size) break;
      PemConfig cfg = PemConfig::uniform(m, k, eta, query_limit, eps.epsilon());
      cfg.cand_size = k * mult;
      if (cfg.total_queries() > query_limit) continue;
      const double s = utility_score(dist, cfg, weights, n);
      if (s > best_score) {
        best_score = s;
        best = cfg;
      }
    }
  }
  if (!best) {
    throw Infeasible("no configuration fits " + std::to_string(query_limit) +
                     " queries");
  }
  return *best;
}

double lemma_E(double x) {
  const double em1 = std::expm1(x);
  return em1 * em1 / std::exp(x);
}

bool lemma_E_check(double eps, unsigned g) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (g < 2) throw InvalidArgument("g must be at least 2");
  return lemma_E(eps / g) < lemma_E(eps) / g;
}

SplitComparison compare_partition_vs_split(double n_i, double f, std::size_t k,
                                           double N_i, double eps, unsigned g) {
  if (g < 1) throw InvalidArgument("g must be at least 1");
  const double A = normal_inv_cdf(clamped_ratio(static_cast<double>(k) - 1.0, N_i));
  const double B = (f / 2.0) * (1.0 - f / 2.0);
  const double C = f * std::sqrt(n_i) / 2.0;
  const double e_full = lemma_E(eps);
  const double e_part = lemma_E(eps / g);
  SplitComparison out;
  out.p1 = A / std::sqrt(1.0 + B * e_full) + C / std::sqrt(g / e_full + g * B);
  out.p2 = A / std::sqrt(1.0 + B * e_part) + C / std::sqrt(1.0 / e_part + B);
  return out;
}

std::uint64_t min_population(double f, PrivacyBudget eps, double multiple,
                             std::optional<int> sd_decimals) {
  if (!(f > 0.0 && f < 1.0)) throw InvalidArgument("f must be in (0, 1)");
  if (!(multiple >= 0.0)) throw InvalidArgument("multiple must be non-negative");
  const double em1 = std::expm1(eps.epsilon());
  double sd = std::sqrt(4.0 * eps.exp()) / em1;
  if (sd_decimals) {
    const double scale = std::pow(10.0, *sd_decimals);
    sd = std::round(sd * scale) / scale;
  }
  const double root = multiple * sd / f;
  const double n = root * root;
  // Relative slack absorbs rounding in the product above.
  return static_cast<std::uint64_t>(std::ceil(n * (1.0 - 1e-12)));
}

nlohmann::ordered_json to_json(const AnalysisResult& result) {
  nlohmann::ordered_json j;
  j["config"] = result.config.to_json();
  j["per_value"] = nlohmann::ordered_json::array();
  for (const auto& v : result.per_value) {
    j["per_value"].push_back({{"rank", v.rank}, {"f", v.f}, {"prob", v.prob}});
  }
  j["score_f1"] = result.score_f1;
  j["score_ncr"] = result.score_ncr;
  return j;
}

}  // namespace ldphh
