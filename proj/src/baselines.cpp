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

#include "ldphh/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_set>

#include "ldphh/error.hpp"
#include "ldphh/hashing.hpp"

namespace ldphh {
namespace {

constexpr std::size_t kChunk = 1 << 16;

void check_fraction(BaselineVariant variant, double fraction) {
  if (variant == BaselineVariant::kPartition && !(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("final user fraction must be in (0, 1)");
  }
}

std::vector<std::uint64_t> pattern_keys(unsigned bits) {
  std::vector<std::uint64_t> keys(std::size_t{1} << bits);
  for (std::uint64_t x = 0; x < keys.size(); ++x) {
    keys[x] = BitValue::from_uint(x, bits).key();
  }
  return keys;
}

// Top `keep` patterns by (count desc, pattern asc).
std::vector<std::uint64_t> top_patterns(std::span<const std::uint64_t> counts,
                                        std::size_t keep) {
  std::vector<std::uint64_t> idx(counts.size());
  std::iota(idx.begin(), idx.end(), 0);
  keep = std::min(keep, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                    [&](std::uint64_t a, std::uint64_t b) {
                      if (counts[a] != counts[b]) return counts[a] > counts[b];
                      return a < b;
                    });
  idx.resize(keep);
  return idx;
}

// Scores candidates against full-value reports and keeps the top k.
Identified final_test(const ReportBatch& batch, std::vector<BitValue> candidates,
                      std::size_t k, const OlhParams& params, double scale) {
  std::vector<std::uint64_t> keys(candidates.size());
  std::transform(candidates.begin(), candidates.end(), keys.begin(),
                 [](const BitValue& v) { return v.key(); });
  std::vector<std::uint64_t> counts(candidates.size(), 0);
  count_supports(batch, keys, counts);
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (counts[a] != counts[b]) return counts[a] > counts[b];
                      return candidates[a] < candidates[b];
                    });
  Identified out;
  const double n = static_cast<double>(batch.size());
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t c = idx[i];
    out.push_back({candidates[c],
                   olh_estimate(static_cast<double>(counts[c]), n, params) * scale});
  }
  return out;
}

bool held_out(std::uint64_t user_index, double fraction, std::uint64_t seed) {
  Rng rng(derive_seed(seed, user_index));
  return rng.unit() < fraction;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return static_cast<std::size_t>(mix64(p.first ^ mix64(p.second)));
  }
};

using PairSet = std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash>;

// Full values whose every segment pair is frequent, in segment-rank order,
// at most `cap` of them.
std::vector<std::vector<std::uint64_t>> assemble(
    const std::vector<std::vector<std::uint64_t>>& seg_top,
    const std::vector<std::vector<PairSet>>& frequent, std::size_t cap) {
  const std::size_t g = seg_top.size();
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> partial;
  auto extend = [&](auto&& self, std::size_t t) -> void {
    if (out.size() >= cap) return;
    if (t == g) {
      out.push_back(partial);
      return;
    }
    for (std::uint64_t x : seg_top[t]) {
      bool ok = true;
      for (std::size_t i = 0; i < t && ok; ++i) {
        ok = frequent[i][t].contains({partial[i], x});
      }
      if (!ok) continue;
      partial.push_back(x);
      self(self, t + 1);
      partial.pop_back();
      if (out.size() >= cap) return;
    }
  };
  extend(extend, 0);
  return out;
}

}  // namespace

double joint_estimate(const JointEstimateInput& in) {
  const double d = in.p - in.q;
  if (d == 0.0) throw InvalidArgument("joint estimation needs p != q");
  return (in.I_ab - (in.n_a_est + in.n_b_est) * in.q * d - in.n * in.q * in.q) /
         (d * d);
}

double joint_estimate_multi(double I_V, const std::map<unsigned, double>& marginals,
                            unsigned arity, double n, double p, double q) {
  if (arity == 0 || arity > 16) throw InvalidArgument("arity must be in [1, 16]");
  const double d = p - q;
  if (d == 0.0) throw InvalidArgument("joint estimation needs p != q");
  const unsigned full = (1u << arity) - 1;
  double background = 0.0;
  for (unsigned mask = 0; mask < full; ++mask) {
    double est = n;
    if (mask != 0) {
      auto it = marginals.find(mask);
      if (it == marginals.end()) {
        throw InvalidArgument("missing marginal for subset mask " + std::to_string(mask));
      }
      est = it->second;
    }
    const int size = std::popcount(mask);
    background += est * std::pow(q, arity - size) * std::pow(d, size);
  }
  return (I_V - background) / std::pow(d, arity);
}

const char* to_string(BaselineVariant v) {
  return v == BaselineVariant::kSplit ? "split" : "partition";
}

BaselineVariant parse_variant(std::string_view name) {
  if (name == "split") return BaselineVariant::kSplit;
  if (name == "partition") return BaselineVariant::kPartition;
  throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

void SpmConfig::validate() const {
  if (g < 2) throw InvalidArgument("SPM needs at least 2 segments");
  if (m == 0 || m % g != 0) {
    throw InvalidArgument("m=" + std::to_string(m) + " is not divisible by g=" +
                          std::to_string(g));
  }
  if (s() > 30) throw InvalidArgument("SPM segments longer than 30 bits");
  if (k == 0) throw InvalidArgument("k must be at least 1");
  PrivacyBudget{eps};
  check_fraction(variant, final_user_fraction);
  const std::uint64_t seg_queries = std::uint64_t{g} << s();
  if (seg_queries > query_limit) {
    throw Infeasible("SPM segment queries exceed the limit");
  }
}

nlohmann::ordered_json SpmConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["g"] = g;
  j["s"] = s();
  j["k"] = k;
  j["eps"] = eps;
  j["query_limit"] = query_limit;
  if (variant == BaselineVariant::kPartition) j["final_user_fraction"] = final_user_fraction;
  return j;
}

SpmConfig spm_plan(unsigned m, std::size_t k, std::uint64_t query_limit,
                   PrivacyBudget eps, BaselineVariant variant,
                   double final_user_fraction) {
  for (unsigned g = 2; g <= m; ++g) {
    if (m % g != 0 || m / g > 30) continue;
    const std::uint64_t pairs = std::uint64_t{g} * (g - 1) / 2;
    const std::uint64_t need = (std::uint64_t{g} << (m / g)) + pairs * k * k + k + 1;
    if (need <= query_limit) {
      SpmConfig cfg{m, g, k, eps.epsilon(), query_limit, variant, final_user_fraction};
      cfg.validate();
      return cfg;
    }
  }
  throw Infeasible("no SPM segmentation of " + std::to_string(m) +
                   " bits fits " + std::to_string(query_limit) + " queries");
}

std::pair<unsigned, unsigned> spm_pair(std::uint64_t user_index, unsigned g,
                                       std::uint64_t master_seed) {
  if (g < 2) throw InvalidArgument("SPM needs at least 2 segments");
  Rng rng(derive_seed(master_seed, user_index));
  std::uint64_t r = rng.uniform(std::uint64_t{g} * (g - 1) / 2);
  for (unsigned a = 1; a < g; ++a) {
    const unsigned row = g - a;
    if (r < row) return {a, a + 1 + static_cast<unsigned>(r)};
    r -= row;
  }
  return {g - 1, g};  // unreachable
}

SpmReport spm_client_report(const BitValue& v, unsigned alpha, unsigned beta,
                            const SpmConfig& cfg, Rng& rng) {
  cfg.validate();
  if (v.size() != cfg.m) throw InvalidArgument("value length differs from m");
  if (!(1 <= alpha && alpha < beta && beta <= cfg.g)) {
    throw InvalidArgument("segment pair must satisfy 1 <= alpha < beta <= g");
  }
  const OlhParams third = OlhParams::make(PrivacyBudget(cfg.eps).split(3));
  const unsigned s = cfg.s();
  SpmReport out;
  out.alpha = alpha;
  out.beta = beta;
  out.full = olh_perturb(v, third, rng);
  out.seg_a = olh_perturb(BitValue::from_uint(v.slice((alpha - 1) * s, s), s), third, rng);
  out.seg_b = olh_perturb(BitValue::from_uint(v.slice((beta - 1) * s, s), s), third, rng);
  return out;
}

RunResult spm_run(const Dataset& data, const SpmConfig& cfg,
                  std::uint64_t master_seed) {
  cfg.validate();
  if (data.m != cfg.m) throw InvalidArgument("dataset width differs from m");
  const bool split = cfg.variant == BaselineVariant::kSplit;
  const PrivacyBudget eps(cfg.eps);
  const OlhParams full_params = OlhParams::make(split ? eps.split(3) : eps);
  const OlhParams seg_params = OlhParams::make(eps.split(split ? 3 : 2));
  const unsigned g = cfg.g;
  const unsigned s = cfg.s();
  const std::size_t pairs = cfg.pair_count();

  // Pair index of (a, b), zero-based a < b, in lexicographic order.
  std::vector<std::vector<std::size_t>> pair_id(g, std::vector<std::size_t>(g, 0));
  std::vector<std::pair<unsigned, unsigned>> pair_of;
  for (unsigned a = 0; a < g; ++a) {
    for (unsigned b = a + 1; b < g; ++b) {
      pair_id[a][b] = pair_of.size();
      pair_of.emplace_back(a, b);
    }
  }

  ReportBatch full(full_params.d_prime);
  std::vector<ReportBatch> side_a(pairs, ReportBatch(seg_params.d_prime));
  std::vector<ReportBatch> side_b(pairs, ReportBatch(seg_params.d_prime));
  const std::uint64_t group_seed = derive_seed(master_seed, Stream::kGroupAssignment);
  const std::uint64_t pair_seed = derive_seed(master_seed, Stream::kSegmentChoice);
  const std::uint64_t perturb_seed = derive_seed(master_seed, Stream::kPerturbation);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const BitValue& v = data.values[i];
    Rng rng(derive_seed(perturb_seed, i));
    const bool final_user = split || held_out(i, cfg.final_user_fraction, group_seed);
    if (final_user) full.add(olh_perturb(v, full_params, rng));
    if (!split && final_user) continue;
    const auto [alpha, beta] = spm_pair(i, g, pair_seed);
    const std::size_t id = pair_id[alpha - 1][beta - 1];
    side_a[id].add(olh_perturb(BitValue::from_uint(v.slice((alpha - 1) * s, s), s),
                               seg_params, rng));
    side_b[id].add(olh_perturb(BitValue::from_uint(v.slice((beta - 1) * s, s), s),
                               seg_params, rng));
  }
  std::size_t ident_users = 0;
  for (const auto& b : side_a) ident_users += b.size();
  if (full.size() == 0 || ident_users == 0) {
    throw InvalidArgument("every SPM phase needs at least one user");
  }

  RunResult out;
  out.protocol = "spm";
  out.variant = to_string(cfg.variant);
  out.config = cfg.to_json();
  out.seed = master_seed;

  // Per-segment top-k over every report of that segment.
  const auto keys = pattern_keys(s);
  std::vector<std::vector<std::uint64_t>> seg_top(g);
  for (unsigned a = 0; a < g; ++a) {
    std::vector<std::uint64_t> counts(keys.size(), 0);
    for (std::size_t id = 0; id < pairs; ++id) {
      if (pair_of[id].first == a) count_supports(side_a[id], keys, counts);
      if (pair_of[id].second == a) count_supports(side_b[id], keys, counts);
    }
    seg_top[a] = top_patterns(counts, cfg.k);
    out.queries_used += keys.size();
  }

  // Joint estimates of every pattern pair, best first, per segment pair.
  struct Scored {
    double estimate;
    std::uint64_t x, y;
  };
  std::vector<std::vector<Scored>> ranked(pairs);
  const double p = seg_params.p;
  const double q = seg_params.q;
  for (std::size_t id = 0; id < pairs; ++id) {
    const auto [a, b] = pair_of[id];
    const double n = static_cast<double>(side_a[id].size());
    auto masks = [&](const ReportBatch& batch, const std::vector<std::uint64_t>& top) {
      std::vector<std::vector<std::uint8_t>> out_masks;
      for (std::uint64_t x : top) out_masks.push_back(support_mask(batch, keys[x]));
      return out_masks;
    };
    const auto ma = masks(side_a[id], seg_top[a]);
    const auto mb = masks(side_b[id], seg_top[b]);
    auto marginal = [&](const std::vector<std::uint8_t>& mask) {
      const double I = std::accumulate(mask.begin(), mask.end(), 0.0);
      return (I - n * q) / (p - q);
    };
    for (std::size_t xi = 0; xi < ma.size(); ++xi) {
      const double na = marginal(ma[xi]);
      for (std::size_t yi = 0; yi < mb.size(); ++yi) {
        std::uint64_t both = 0;
        for (std::size_t r = 0; r < ma[xi].size(); ++r) both += ma[xi][r] & mb[yi][r];
        const double est = joint_estimate(
            {static_cast<double>(both), n, na, marginal(mb[yi]), p, q});
        ranked[id].push_back({est, seg_top[a][xi], seg_top[b][yi]});
      }
    }
    out.queries_used += ranked[id].size();
    std::sort(ranked[id].begin(), ranked[id].end(), [](const Scored& l, const Scored& r) {
      if (l.estimate != r.estimate) return l.estimate > r.estimate;
      return std::tie(l.x, l.y) < std::tie(r.x, r.y);
    });
  }

  // Add pattern pairs round-robin over segment pairs until the join yields
  // more than k full values.
  const std::uint64_t remaining =
      cfg.query_limit > out.queries_used ? cfg.query_limit - out.queries_used : 0;
  std::vector<std::vector<PairSet>> frequent(g, std::vector<PairSet>(g));
  std::vector<std::vector<std::uint64_t>> joined;
  std::size_t depth = 0;
  bool done = false;
  while (!done) {
    bool added = false;
    for (std::size_t id = 0; id < pairs && !done; ++id) {
      if (depth >= ranked[id].size()) continue;
      const auto [a, b] = pair_of[id];
      frequent[a][b].insert({ranked[id][depth].x, ranked[id][depth].y});
      added = true;
      joined = assemble(seg_top, frequent, remaining);
      done = joined.size() > cfg.k || joined.size() >= remaining;
    }
    if (!added) break;
    ++depth;
  }

  std::vector<BitValue> candidates;
  for (const auto& parts : joined) {
    BitValue v;
    for (std::uint64_t x : parts) v = v.append(x, s);
    candidates.push_back(v);
  }
  out.queries_used += candidates.size();
  const double scale = static_cast<double>(data.n()) / full.size();
  out.identified = final_test(full, std::move(candidates), cfg.k, full_params, scale);
  return out;
}

std::size_t mcm_channels(std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  // Integer search avoids pow() rounding: smallest h with h^2 >= k^3.
  const auto k3 = static_cast<unsigned __int128>(k) * k * k;
  auto h = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(k), 1.5)));
  while (h > 0 && static_cast<unsigned __int128>(h) * h >= k3) --h;
  while (static_cast<unsigned __int128>(h) * h < k3) ++h;
  return h;
}

void McmConfig::validate() const {
  if (seg_len == 0 || m == 0 || m % seg_len != 0) {
    throw InvalidArgument("m=" + std::to_string(m) +
                          " is not divisible by seg_len=" + std::to_string(seg_len));
  }
  if (seg_len > 30) throw InvalidArgument("MCM segments longer than 30 bits");
  if (k == 0 || h == 0) throw InvalidArgument("k and h must be at least 1");
  PrivacyBudget{eps};
  if (variant == BaselineVariant::kSplit) {
    PrivacyBudget{eps1};
    PrivacyBudget{eps2};
    if (std::abs(eps1 + eps2 - eps) > 1e-12 * eps) {
      throw InvalidArgument("eps1 + eps2 must equal eps");
    }
  }
  check_fraction(variant, final_user_fraction);
  const std::uint64_t queries = (std::uint64_t{h} * segments() << seg_len) + h;
  if (queries > query_limit) {
    throw Infeasible("MCM needs " + std::to_string(queries) +
                     " queries, limit is " + std::to_string(query_limit));
  }
}

nlohmann::ordered_json McmConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["seg_len"] = seg_len;
  j["k"] = k;
  j["h"] = h;
  j["eps"] = eps;
  if (variant == BaselineVariant::kSplit) {
    j["eps1"] = eps1;
    j["eps2"] = eps2;
  } else {
    j["final_user_fraction"] = final_user_fraction;
  }
  j["channel_seed"] = channel_seed;
  j["query_limit"] = query_limit;
  return j;
}

McmConfig mcm_plan(unsigned m, std::size_t k, std::uint64_t query_limit,
                   PrivacyBudget eps, BaselineVariant variant,
                   double final_user_fraction, std::uint64_t channel_seed) {
  const std::size_t h = mcm_channels(k);
  for (unsigned len = std::min(m, 30u); len >= 1; --len) {
    if (m % len != 0) continue;
    const std::uint64_t queries = (std::uint64_t{h} * (m / len) << len) + h;
    if (queries > query_limit) continue;
    McmConfig cfg;
    cfg.m = m;
    cfg.seg_len = len;
    cfg.k = k;
    cfg.h = h;
    cfg.eps = eps.epsilon();
    cfg.eps1 = cfg.eps2 = eps.epsilon() / 2;
    cfg.channel_seed = channel_seed;
    cfg.query_limit = query_limit;
    cfg.variant = variant;
    cfg.final_user_fraction = final_user_fraction;
    cfg.validate();
    return cfg;
  }
  throw Infeasible("no MCM segment length fits " + std::to_string(query_limit) +
                   " queries with " + std::to_string(h) + " channels");
}

std::size_t mcm_channel(const BitValue& v, std::size_t h,
                        std::uint64_t channel_seed) {
  if (h == 0) throw InvalidArgument("h must be at least 1");
  return static_cast<std::size_t>(bucket_of(seed_key(channel_seed), v.key(), h));
}

namespace {

OlhReport noise_payload(const OlhParams& params, Rng& rng) {
  OlhReport r;
  r.seed = HashSeed{rng()};
  r.y = static_cast<std::uint32_t>(rng.uniform(params.d_prime)) + 1;
  return r;
}

void fill_payloads(McmReport& out, const BitValue& v, const McmConfig& cfg,
                   const OlhParams& params, Rng& rng) {
  out.seg_index = static_cast<unsigned>(rng.uniform(cfg.segments()));
  const std::size_t own = mcm_channel(v, cfg.h, cfg.channel_seed);
  const BitValue segment = BitValue::from_uint(
      v.slice(out.seg_index * cfg.seg_len, cfg.seg_len), cfg.seg_len);
  out.payloads.clear();
  out.payloads.reserve(cfg.h);
  for (std::size_t c = 0; c < cfg.h; ++c) {
    out.payloads.push_back(c == own ? olh_perturb(segment, params, rng)
                                    : noise_payload(params, rng));
  }
}

}  // namespace

McmReport mcm_client_report(const BitValue& v, const McmConfig& cfg, Rng& rng) {
  cfg.validate();
  if (v.size() != cfg.m) throw InvalidArgument("value length differs from m");
  const bool split = cfg.variant == BaselineVariant::kSplit;
  McmReport out;
  if (split) out.full = olh_perturb(v, PrivacyBudget(cfg.eps1), rng);
  fill_payloads(out, v, cfg, OlhParams::make(PrivacyBudget(split ? cfg.eps2 : cfg.eps)),
                rng);
  return out;
}

RunResult mcm_run(const Dataset& data, const McmConfig& cfg,
                  std::uint64_t master_seed) {
  cfg.validate();
  if (data.m != cfg.m) throw InvalidArgument("dataset width differs from m");
  const bool split = cfg.variant == BaselineVariant::kSplit;
  const OlhParams full_params = OlhParams::make(PrivacyBudget(split ? cfg.eps1 : cfg.eps));
  const OlhParams chan_params = OlhParams::make(PrivacyBudget(split ? cfg.eps2 : cfg.eps));
  const std::size_t h = cfg.h;
  const unsigned segs = cfg.segments();
  const auto keys = pattern_keys(cfg.seg_len);
  const std::size_t patterns = keys.size();

  // counts[(c * segs + l) * patterns + x]
  std::vector<std::uint64_t> counts(h * segs * patterns, 0);
  ReportBatch full(full_params.d_prime);
  const std::uint64_t group_seed = derive_seed(master_seed, Stream::kGroupAssignment);
  const std::uint64_t perturb_seed = derive_seed(master_seed, Stream::kPerturbation);
  std::size_t ident_users = 0;
  McmReport report;
  // Channel payloads are aggregated chunk by chunk to bound memory.
  for (std::size_t start = 0; start < data.n(); start += kChunk) {
    std::vector<ReportBatch> cells(h * segs, ReportBatch(chan_params.d_prime));
    const std::size_t end = std::min(data.n(), start + kChunk);
    for (std::size_t i = start; i < end; ++i) {
      const BitValue& v = data.values[i];
      Rng rng(derive_seed(perturb_seed, i));
      if (split) {
        full.add(olh_perturb(v, full_params, rng));
      } else if (held_out(i, cfg.final_user_fraction, group_seed)) {
        full.add(olh_perturb(v, full_params, rng));
        continue;
      }
      fill_payloads(report, v, cfg, chan_params, rng);
      for (std::size_t c = 0; c < h; ++c) {
        cells[c * segs + report.seg_index].add(report.payloads[c]);
      }
      ++ident_users;
    }
    for (std::size_t cell = 0; cell < cells.size(); ++cell) {
      count_supports(cells[cell], keys,
                     std::span(counts).subspan(cell * patterns, patterns));
    }
  }
  if (full.size() == 0 || ident_users == 0) {
    throw InvalidArgument("every MCM phase needs at least one user");
  }

  RunResult out;
  out.protocol = "mcm";
  out.variant = to_string(cfg.variant);
  out.config = cfg.to_json();
  out.seed = master_seed;
  out.queries_used = h * segs * patterns;

  // Per channel and segment the best-supported pattern wins; every user of a
  // segment adds the same 1/d' noise level, so this is the argmax of the
  // baseline-subtracted estimate.
  std::vector<BitValue> candidates;
  std::unordered_set<BitValue> seen;
  for (std::size_t c = 0; c < h; ++c) {
    BitValue v;
    for (unsigned l = 0; l < segs; ++l) {
      const auto cell = std::span<const std::uint64_t>(counts).subspan(
          (c * segs + l) * patterns, patterns);
      v = v.append(top_patterns(cell, 1).front(), cfg.seg_len);
    }
    if (seen.insert(v).second) candidates.push_back(v);
  }
  out.queries_used += candidates.size();
  const double scale = static_cast<double>(data.n()) / full.size();
  out.identified = final_test(full, std::move(candidates), cfg.k, full_params, scale);
  return out;
}

}  // namespace ldphh
