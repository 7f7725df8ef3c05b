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

#include "ldphh/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "ldphh/error.hpp"
#include "ldphh/pem.hpp"

namespace ldphh {
namespace {

std::string number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string label(const RunSpec& spec) {
  if (spec.protocol != "pem") return to_string(spec.variant);
  if (spec.eta) return "eta" + std::to_string(*spec.eta);
  return spec.theta ? "threshold" : "topk";
}

std::size_t effective_k(const RunSpec& spec) {
  if (!spec.theta) return spec.k;
  if (!(*spec.theta > 0.0 && *spec.theta < 1.0)) {
    throw InvalidArgument("theta must be in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(1.0 / *spec.theta));
}

GroundTruth truth_for(const GroundTruth& counts, const RunSpec& spec,
                      std::size_t n) {
  if (!spec.theta) return counts.top(spec.k);
  std::vector<ScoredValue> above;
  for (const auto& s : counts.ranked()) {
    if (s.count / static_cast<double>(n) > *spec.theta) above.push_back(s);
  }
  return GroundTruth(std::move(above));
}

void add_summary(std::vector<ResultRow>& rows, std::size_t first) {
  const std::size_t reps = rows.size() - first;
  ResultRow mean = rows[first];
  ResultRow sd = rows[first];
  mean.seed = "mean";
  sd.seed = "std";
  auto stats = [&](auto get, double& m, double& s) {
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = first; i < first + reps; ++i) {
      const std::optional<double> x = get(rows[i]);
      if (!x) continue;
      sum += *x;
      ++count;
    }
    if (count == 0) return false;
    m = sum / count;
    for (std::size_t i = first; i < first + reps; ++i) {
      const std::optional<double> x = get(rows[i]);
      if (x) sq += (*x - m) * (*x - m);
    }
    s = count > 1 ? std::sqrt(sq / (count - 1)) : 0.0;
    return true;
  };
  stats([](const ResultRow& r) { return std::optional<double>(r.f1); }, mean.f1, sd.f1);
  stats([](const ResultRow& r) { return std::optional<double>(r.ncr); }, mean.ncr, sd.ncr);
  stats([](const ResultRow& r) { return std::optional<double>(r.queries); },
        mean.queries, sd.queries);
  stats([](const ResultRow& r) { return std::optional<double>(r.wall_ms); },
        mean.wall_ms, sd.wall_ms);
  double vm = 0.0, vs = 0.0;
  if (stats([](const ResultRow& r) { return r.est_var; }, vm, vs)) {
    mean.est_var = vm;
    sd.est_var = vs;
  } else {
    mean.est_var.reset();
    sd.est_var.reset();
  }
  rows.push_back(mean);
  rows.push_back(sd);
}

}  // namespace

PemConfig pem_config(unsigned m, const RunSpec& spec) {
  const std::size_t k = effective_k(spec);
  return spec.eta ? PemConfig::uniform(m, k, *spec.eta, spec.query_limit, spec.eps)
                  : plan(m, k, spec.query_limit, PrivacyBudget(spec.eps));
}

RunResult run_protocol(const Dataset& data, const GroundTruth& counts,
                       const RunSpec& spec, std::uint64_t seed) {
  const PrivacyBudget eps(spec.eps);
  const std::size_t k = effective_k(spec);
  RunResult result;
  if (spec.protocol == "pem") {
    const PemConfig cfg = pem_config(data.m, spec);
    result = spec.theta ? run_threshold(data, cfg, *spec.theta, seed)
                        : run_topk(data, cfg, seed);
  } else if (spec.theta) {
    throw InvalidArgument("the threshold variant is only defined for pem");
  } else if (spec.protocol == "spm") {
    result = spm_run(data,
                     spm_plan(data.m, k, spec.query_limit, eps, spec.variant,
                              spec.final_fraction),
                     seed);
  } else if (spec.protocol == "mcm") {
    result = mcm_run(data,
                     mcm_plan(data.m, k, spec.query_limit, eps, spec.variant,
                              spec.final_fraction),
                     seed);
  } else {
    throw InvalidArgument("unknown protocol '" + spec.protocol + "'");
  }
  const GroundTruth truth = truth_for(counts, spec, data.n());
  result.metrics = score(truth, result, truth.size());
  return result;
}

std::string to_csv(const ResultRow& row) {
  std::string out = row.protocol + "," + row.variant + "," + number(row.eps) + "," +
                    std::to_string(row.k) + "," +
                    (row.theta ? number(*row.theta) : std::string()) + "," + row.seed +
                    "," + number(row.f1) + "," + number(row.ncr) + "," +
                    (row.est_var ? number(*row.est_var) : std::string()) + "," +
                    number(row.queries) + "," + number(row.wall_ms);
  return out;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, unsigned r) {
  return derive_seed(derive_seed(master_seed, Stream::kRepetition), r);
}

ExperimentOutput run_experiment(const Dataset& data, const ExperimentSpec& spec) {
  if (spec.reps == 0) throw InvalidArgument("repetitions must be at least 1");
  if (spec.runs.empty()) throw InvalidArgument("no protocol to run");
  const GroundTruth counts = exact_counts(data);
  ExperimentOutput out;
  for (const RunSpec& run : spec.runs) {
    const std::size_t first = out.rows.size();
    for (unsigned r = 0; r < spec.reps; ++r) {
      const std::uint64_t seed = repetition_seed(spec.master_seed, r);
      const auto start = std::chrono::steady_clock::now();
      RunResult result = run_protocol(data, counts, run, seed);
      const auto stop = std::chrono::steady_clock::now();
      ResultRow row;
      row.protocol = run.protocol;
      row.variant = label(run);
      row.eps = run.eps;
      row.k = effective_k(run);
      row.theta = run.theta;
      row.seed = std::to_string(seed);
      row.f1 = result.metrics->f1;
      row.ncr = result.metrics->ncr;
      row.est_var = result.metrics->var;
      row.queries = static_cast<double>(result.queries_used);
      if (spec.timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
      out.rows.push_back(std::move(row));
      out.results.push_back(std::move(result));
    }
    add_summary(out.rows, first);
  }
  return out;
}

}  // namespace ldphh
