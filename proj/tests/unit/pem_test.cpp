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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "ldphh/analysis.hpp"
#include "ldphh/error.hpp"
#include "ldphh/harness.hpp"

namespace ldphh {
namespace {

constexpr std::uint64_t kMiB = std::uint64_t{1} << 20;

Dataset constant_dataset(std::uint64_t x, unsigned m, std::size_t n) {
  return Dataset{m, std::vector<BitValue>(n, BitValue::from_uint(x, m))};
}

std::unordered_set<BitValue> values_of(const Identified& found) {
  std::unordered_set<BitValue> out;
  for (const auto& s : found) out.insert(s.value);
  return out;
}

TEST(Plan, Examples) {
  const auto a = plan(64, 32, kMiB, PrivacyBudget(1.0));
  EXPECT_EQ(a.gamma, 5u);
  EXPECT_EQ(a.eta, 12u);
  EXPECT_EQ(a.g, 5u);
  EXPECT_EQ(a.cand_size, 32u);
  const auto b = plan(16, 16, kMiB, PrivacyBudget(1.0));
  EXPECT_EQ(b.gamma, 4u);
  EXPECT_EQ(b.eta, 12u);
  EXPECT_EQ(b.g, 1u);
  EXPECT_THROW(plan(128, std::size_t{1} << 18, kMiB, PrivacyBudget(1.0)), Infeasible);
}

TEST(Plan, EtaIsMaximalByEnumeration) {
  for (unsigned m : {16u, 32u, 64u}) {
    for (std::size_t k : {4u, 16u, 64u}) {
      for (std::uint64_t limit : {std::uint64_t{1} << 14, std::uint64_t{1} << 18, kMiB}) {
        const unsigned gamma = std::bit_width(k - 1);
        unsigned best = 0;
        for (unsigned eta = 1; eta <= m - gamma; ++eta) {
          const std::uint64_t g = (m - gamma + eta - 1) / eta;
          if (std::ldexp(double(g), gamma + eta) <= double(limit)) best = eta;
        }
        if (best == 0) {
          EXPECT_THROW(plan(m, k, limit, PrivacyBudget(1.0)), Infeasible);
          continue;
        }
        const auto cfg = plan(m, k, limit, PrivacyBudget(1.0));
        EXPECT_EQ(cfg.eta, best) << m << " " << k << " " << limit;
        EXPECT_LE(cfg.total_queries(), limit);
        EXPECT_GE(cfg.gamma + cfg.g * cfg.eta, m);
      }
    }
  }
}

TEST(PemConfig, RoundsClipTheLastExtension) {
  const auto cfg = PemConfig::uniform(32, 8, 11, kMiB, 1.0);  // gamma 3, 29 bits left
  const auto r = cfg.rounds();
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].prefix_bits, 14u);
  EXPECT_EQ(r[1].prefix_bits, 25u);
  EXPECT_EQ(r[2].prefix_bits, 32u);
  EXPECT_EQ(r[2].extension, 7u);
  const auto d = cfg.domain_sizes();
  EXPECT_EQ(d, (std::vector<std::uint64_t>{1u << 14, 8u << 11, 8u << 7}));
  EXPECT_EQ(cfg.total_queries(), (1u << 14) + (8u << 11) + (8u << 7));
}

TEST(PemConfig, OverridesAreValidated) {
  auto cfg = PemConfig::uniform(16, 16, 6, kMiB, 1.0);
  cfg.etas = {4, 8};
  EXPECT_EQ(cfg.rounds()[0].prefix_bits, 8u);
  cfg.etas = {4, 4};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.etas = {};
  cfg.user_shares = {0.3, 0.3};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.user_shares = {0.3, 0.7};
  EXPECT_NO_THROW(cfg.validate());
  cfg.cand_sizes = {4};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.cand_sizes = {4, 64};
  EXPECT_EQ(cfg.domain_sizes()[1], 4u << 6);
  cfg.query_limit = 100;
  EXPECT_THROW(cfg.validate(), Infeasible);
}

TEST(PemConfig, SmallFirstDomainCarriesAllCandidates) {
  auto cfg = PemConfig::uniform(16, 16, 6, kMiB, 1.0);
  cfg.gamma = 1;
  cfg.etas = {1, 14};
  cfg.eta = 1;
  // |D_1| = 4 < cand_size, so D_2 = 4 * 2^14.
  EXPECT_EQ(cfg.domain_sizes()[1], 4u << 14);
}

TEST(AssignGroup, UniformAndDeterministic) {
  EXPECT_EQ(assign_group(123, 1, 9), 1u);
  const int n = 100000;
  std::vector<int> sizes(6, 0);
  for (int i = 0; i < n; ++i) {
    const unsigned grp = assign_group(i, 5, 77);
    ASSERT_GE(grp, 1u);
    ASSERT_LE(grp, 5u);
    ++sizes[grp];
    if (i < 100) EXPECT_EQ(assign_group(i, 5, 77), grp);
  }
  const double sigma = std::sqrt(n * 0.2 * 0.8);
  for (int grp = 1; grp <= 5; ++grp) EXPECT_NEAR(sizes[grp], n / 5.0, 4 * sigma);
}

TEST(AssignGroup, WeightedShares) {
  const std::vector<double> shares = {0.1, 0.6, 0.3};
  const int n = 100000;
  std::vector<int> sizes(4, 0);
  for (int i = 0; i < n; ++i) ++sizes[assign_group(i, shares, 5)];
  for (int grp = 1; grp <= 3; ++grp) {
    const double p = shares[grp - 1];
    EXPECT_NEAR(sizes[grp], n * p, 4 * std::sqrt(n * p * (1 - p)));
  }
}

TEST(ClientReport, ReportsTheRoundPrefix) {
  const auto cfg = [] {
    auto c = PemConfig::uniform(32, 16, 10, kMiB, 2.0);  // gamma 4, prefixes 14, 24, 32
    return c;
  }();
  const auto v = BitValue::from_uint(0xDEADBEEF, 32);
  for (unsigned grp : {1u, 2u, 3u}) {
    const unsigned len = std::min(4 + grp * 10, 32u);
    Rng a(grp), b(grp);
    const auto r = client_report(v, grp, cfg, a);
    EXPECT_EQ(r.group, grp);
    EXPECT_EQ(r.inner, olh_perturb(v.prefix(len), PrivacyBudget(2.0), b));
  }
  Rng rng(1);
  EXPECT_THROW(client_report(v, 4, cfg, rng), InvalidArgument);
  EXPECT_THROW(client_report(v.prefix(31), 1, cfg, rng), InvalidArgument);
}

TEST(ExtendCandidates, Examples) {
  const std::vector<BitValue> prev = {BitValue::from_binary("01")};
  const auto out = extend_candidates(prev, 2, 8);
  std::vector<std::string> bits;
  for (const auto& b : out) bits.push_back(b.to_binary());
  EXPECT_EQ(bits, (std::vector<std::string>{"0100", "0101", "0110", "0111"}));
  EXPECT_TRUE(extend_candidates({}, 3, 8).empty());
  const std::vector<BitValue> three = {BitValue::from_binary("000"), BitValue::from_binary("101"),
                                       BitValue::from_binary("111")};
  EXPECT_EQ(extend_candidates(three, 4, 16).size(), 3u * 16);
  EXPECT_EQ(extend_candidates(three, 4, 5).size(), 3u * 4);  // clipped at m
}

TEST(IdentifyRound, SmallDomainReturnsEverything) {
  const PrivacyBudget eps(1.0);
  Rng rng(4);
  std::vector<PemReport> reports;
  for (int i = 0; i < 100; ++i) {
    reports.push_back({1, olh_perturb(BitValue::from_uint(i % 4, 2), eps, rng)});
  }
  std::vector<BitValue> domain;
  for (int x = 0; x < 4; ++x) domain.push_back(BitValue::from_uint(x, 2));
  const auto c = identify_round(reports, domain, 10, eps);
  EXPECT_EQ(c.prefixes.size(), 4u);
  EXPECT_EQ(identify_round(reports, domain, 3, eps).prefixes.size(), 3u);
  EXPECT_TRUE(std::is_sorted(c.estimates.rbegin(), c.estimates.rend()));
}

TEST(IdentifyRound, UnanimousValueRanksFirst) {
  const PrivacyBudget eps(4.0);
  const auto target = BitValue::from_uint(0x2A, 8);
  std::vector<BitValue> domain;
  for (int x = 0; x < 256; ++x) domain.push_back(BitValue::from_uint(x, 8));
  int first = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(31, t));
    std::vector<PemReport> reports;
    for (int i = 0; i < 10000; ++i) reports.push_back({1, olh_perturb(target, eps, rng)});
    first += identify_round(reports, domain, 4, eps).prefixes.front() == target;
  }
  EXPECT_GE(first, 99);
}

TEST(RunTopk, UnanimousValueAlwaysFound) {
  const auto data = constant_dataset(0xC0FFEE, 24, 5000);
  const auto cfg = plan(24, 4, std::uint64_t{1} << 14, PrivacyBudget(2.0));
  for (int t = 0; t < 100; ++t) {
    const auto r = run_topk(data, cfg, derive_seed(3, t));
    EXPECT_TRUE(values_of(r.identified).contains(data.values.front())) << t;
  }
}

TEST(RunTopk, KBeyondDistinctValuesReturnsSuperset) {
  Dataset data{20, {}};
  for (int i = 0; i < 30000; ++i) data.values.push_back(BitValue::from_uint(1000 * (i % 3) + 7, 20));
  const auto cfg = plan(20, 8, std::uint64_t{1} << 16, PrivacyBudget(2.0));
  for (int t = 0; t < 10; ++t) {
    const auto r = run_topk(data, cfg, derive_seed(6, t));
    EXPECT_EQ(r.identified.size(), 8u);
    const auto found = values_of(r.identified);
    for (int x = 0; x < 3; ++x) EXPECT_TRUE(found.contains(BitValue::from_uint(1000 * x + 7, 20)));
  }
}

TEST(RunTopk, AuditTrailAndQueryAccounting) {
  const auto data = generate({DistributionSpec::zipf(1.5, 256), 32, 20000, 8});
  const auto cfg = PemConfig::uniform(32, 8, 10, std::uint64_t{1} << 16, 3.0);
  const auto r = run_topk(data, cfg, 12);
  ASSERT_EQ(r.rounds.size(), cfg.g);
  const auto sizes = cfg.domain_sizes();
  EXPECT_EQ(r.queries_used, std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0}));
  EXPECT_LE(r.queries_used, cfg.query_limit);
  const auto plan_rounds = cfg.rounds();
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    std::set<BitValue> members(r.rounds[i].prefixes.begin(), r.rounds[i].prefixes.end());
    EXPECT_EQ(members.size(), r.rounds[i].prefixes.size());
    for (const auto& s : r.identified) {
      EXPECT_TRUE(members.contains(s.value.prefix(plan_rounds[i].prefix_bits))) << i;
    }
  }
  EXPECT_EQ(r.identified.size(), 8u);
}

TEST(RunTopk, Deterministic) {
  const auto data = generate({DistributionSpec::zipf(1.5, 256), 32, 20000, 8});
  const auto cfg = PemConfig::uniform(32, 8, 10, std::uint64_t{1} << 16, 3.0);
  EXPECT_EQ(to_json(run_topk(data, cfg, 5)).dump(), to_json(run_topk(data, cfg, 5)).dump());
  EXPECT_NE(to_json(run_topk(data, cfg, 5)).dump(), to_json(run_topk(data, cfg, 6)).dump());
}

TEST(RunTopk, ReportsReproduceTheRun) {
  const auto data = generate({DistributionSpec::zipf(1.5, 64), 16, 3000, 1});
  const auto cfg = PemConfig::uniform(16, 4, 7, std::uint64_t{1} << 16, 2.0);
  const auto recs = pem_reports(data, cfg, 9);
  ASSERT_EQ(recs.size(), data.n());
  // Rerunning the last round on the exported reports gives the same output.
  const auto r = run_topk(data, cfg, 9);
  std::vector<PemReport> last;
  for (const auto& rec : recs) {
    if (rec.group == cfg.g) last.push_back({rec.group, rec.report});
  }
  const auto prev = r.rounds[cfg.g - 2].prefixes;
  const auto domain = extend_candidates(prev, cfg.rounds().back().extension, 16);
  const auto c = identify_round(last, domain, cfg.k, PrivacyBudget(2.0), cfg.g);
  ASSERT_EQ(c.prefixes.size(), r.identified.size());
  for (std::size_t i = 0; i < c.prefixes.size(); ++i) EXPECT_EQ(c.prefixes[i], r.identified[i].value);
}

TEST(RunTopk, F1MatchesAnalyticScore) {
  const auto dist = DistributionSpec::zipf(1.5, 1024);
  const auto data = generate({dist, 32, 100000, 2});
  const auto truth = exact_counts(data).top(8);
  const auto cfg = plan(32, 8, std::uint64_t{1} << 16, PrivacyBudget(4.0));
  double mean = 0;
  for (int t = 0; t < 20; ++t) mean += f1(truth, run_topk(data, cfg, derive_seed(20, t)).identified) / 20;
  EXPECT_NEAR(mean, utility_score(dist, cfg, WeightScheme::f1(8), 1e5), 0.1);
}

TEST(RunTopk, F1NonDecreasingInEps) {
  const auto data = generate({DistributionSpec::zipf(1.5, 1024), 24, 20000, 3});
  const auto truth = exact_counts(data).top(8);
  double prev_mean = -1, prev_se = 0;
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const auto cfg = plan(24, 8, std::uint64_t{1} << 12, PrivacyBudget(eps));
    std::vector<double> f;
    for (int t = 0; t < 20; ++t) f.push_back(f1(truth, run_topk(data, cfg, derive_seed(21, t)).identified));
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / f.size();
    double var = 0;
    for (double x : f) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (f.size() - 1) / f.size());
    EXPECT_GE(mean, prev_mean - 2 * std::hypot(se, prev_se)) << eps;
    prev_mean = mean;
    prev_se = se;
  }
}

TEST(RunTopk, FinalEstimateVarianceMatchesOlh) {
  // Eight values at 6% each over a flat tail keep the frequency terms small.
  std::vector<double> f(8, 0.06);
  f.resize(8 + 1000, 0.52 / 1000);
  const auto data = generate({DistributionSpec::empirical(f), 16, 100000, 4});
  const auto truth = exact_counts(data).top(8);
  const auto cfg = PemConfig::uniform(16, 8, 7, kMiB, 1.0);  // g = 2
  const PrivacyBudget eps(1.0);
  double sum = 0;
  for (int t = 0; t < 20; ++t) sum += est_var(truth, run_topk(data, cfg, derive_seed(22, t)).identified);
  // Estimates are scaled by n / n_g with n_g ~ n / 2.
  const double expected = 4.0 * olh_variance(data.n() / 2.0, eps);
  EXPECT_NEAR(sum / 20 / expected, 1.0, 0.25);
}

TEST(RunThreshold, ThetaAboveEveryFrequencyGivesEmptyOutput) {
  const auto data = generate({DistributionSpec::zipf(1.5, 1024), 12, 20000, 5});
  const auto cfg = PemConfig::uniform(12, 2, 11, kMiB, 2.0);
  int empty = 0;
  for (int t = 0; t < 100; ++t) empty += run_threshold(data, cfg, 0.6, derive_seed(23, t)).identified.empty();
  EXPECT_GE(empty, 95);
}

TEST(RunThreshold, KeepsOnlyEstimatesAboveTheta) {
  const auto data = generate({DistributionSpec::exponential(0.05, 1024), 24, 50000, 6});
  const auto cfg = PemConfig::uniform(24, 44, 6, kMiB, 4.0);
  const double theta = 0.023;
  const auto r = run_threshold(data, cfg, theta, 7);
  EXPECT_LE(r.identified.size(), 44u);
  for (const auto& s : r.identified) EXPECT_GT(s.count / data.n(), theta);
  for (const auto& round : r.rounds) EXPECT_LE(round.prefixes.size(), 44u);
  EXPECT_THROW(run_threshold(data, cfg, 0.0, 7), InvalidArgument);
  EXPECT_THROW(run_threshold(data, cfg, 1.0, 7), InvalidArgument);
}

TEST(RunThreshold, SmallThetaMatchesTopk) {
  const auto data = generate({DistributionSpec::zipf(1.5, 256), 16, 20000, 7});
  const auto cfg = PemConfig::uniform(16, 8, 6, kMiB, 2.0);
  const auto a = run_threshold(data, cfg, 1e-9, 3);
  const auto b = run_topk(data, cfg, 3);
  ASSERT_EQ(a.identified.size(), b.identified.size());
  for (std::size_t i = 0; i < a.identified.size(); ++i) EXPECT_EQ(a.identified[i], b.identified[i]);
}

TEST(RunTopk, RejectsWrongWidthAndInfeasiblePlans) {
  const auto data = constant_dataset(1, 16, 10);
  EXPECT_THROW(run_topk(data, PemConfig::uniform(24, 4, 4, kMiB, 1.0), 1), InvalidArgument);
  EXPECT_THROW(run_topk(data, PemConfig::uniform(16, 4, 12, 1000, 1.0), 1), Infeasible);
}

}  // namespace
}  // namespace ldphh
