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

// Command-line front end: gen, run, compare, analyze, optimize.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldphh/analysis.hpp"
#include "ldphh/datagen.hpp"
#include "ldphh/error.hpp"
#include "ldphh/harness.hpp"
#include "ldphh/pem.hpp"

namespace {

using namespace ldphh;

constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kIo = 4;

struct Global {
  std::uint64_t seed = 1;
  std::uint64_t query_limit = std::uint64_t{1} << 20;
  std::string out = "-";
  std::string format = "csv";
  bool timing = false;
};

struct DistFlags {
  std::string dist = "zipf";
  double s = 1.5;
  std::size_t drop = 0;
  double rate = 0.05;
  std::size_t support = 1024;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dist", dist, "zipf or exp")
        ->check(CLI::IsMember({"zipf", "exp"}))
        ->capture_default_str();
    cmd->add_option("--s", s, "zipf exponent")->capture_default_str();
    cmd->add_option("--drop", drop, "zipf ranks dropped from the head")
        ->capture_default_str();
    cmd->add_option("--rate", rate, "exponential rate over ranks")->capture_default_str();
    cmd->add_option("--support", support, "number of distinct values")
        ->capture_default_str();
  }

  DistributionSpec make() const {
    return dist == "zipf" ? DistributionSpec::zipf(s, support, drop)
                          : DistributionSpec::exponential(rate, support);
  }
};

struct DataFlags {
  std::string path;
  unsigned m = 0;
  std::string mode = "int";

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "dataset file")->required();
    cmd->add_option("--m", m, "bits per value")->required();
    cmd->add_option("--mode", mode, "int or text")
        ->check(CLI::IsMember({"int", "text"}))
        ->capture_default_str();
  }

  Dataset load() const {
    return ldphh::load(path, m, mode == "int" ? LoadMode::kInt : LoadMode::kText);
  }
};

// Writes to a file, or stdout for "-".
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path + " failed");
}

std::string render(const ExperimentOutput& result, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : result.results) j.push_back(to_json(r));
    return j.dump(2) + "\n";
  }
  std::string text = std::string(kCsvHeader) + "\n";
  for (const auto& row : result.rows) text += to_csv(row) + "\n";
  return text;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Locally differentially private heavy-hitter identification"};
  app.require_subcommand(1);
  app.fallthrough();
  Global global;
  app.add_option("--seed", global.seed, "master seed")->capture_default_str();
  app.add_option("--query-limit", global.query_limit, "maximum oracle queries")
      ->capture_default_str();
  app.add_option("-o,--out", global.out, "output path, - for stdout")
      ->capture_default_str();
  app.add_option("--format", global.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--timing", global.timing, "record wall-clock time per run");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  DistFlags gen_dist;
  gen_dist.attach(gen);
  std::size_t gen_n = 100000;
  unsigned gen_m = 0;
  std::size_t sidecar_top = 100;
  gen->add_option("--n", gen_n, "number of users")->capture_default_str();
  gen->add_option("--m", gen_m, "bits per value")->required();
  gen->add_option("--sidecar-top", sidecar_top, "true top values kept in the sidecar")
      ->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "run one protocol for several repetitions");
  DataFlags run_data;
  run_data.attach(run);
  std::string protocol = "pem";
  std::string variant = "split";
  double final_frac = 0.1;
  double eps = 1.0;
  std::size_t k = 16;
  std::optional<double> theta;
  std::optional<unsigned> eta;
  unsigned reps = 1;
  std::string reports_path;
  run->add_option("--protocol", protocol, "pem, spm or mcm")
      ->check(CLI::IsMember({"pem", "spm", "mcm"}))
      ->capture_default_str();
  run->add_option("--variant", variant, "split or partition (baselines)")
      ->check(CLI::IsMember({"split", "partition"}))
      ->capture_default_str();
  run->add_option("--final-frac", final_frac, "held-out user fraction")
      ->capture_default_str();
  run->add_option("--eps", eps, "privacy budget")->capture_default_str();
  run->add_option("--k", k, "heavy hitters to identify")->capture_default_str();
  run->add_option("--theta", theta, "frequency threshold (pem)");
  run->add_option("--eta", eta, "bits added per round (pem); planned when absent");
  run->add_option("--reps", reps, "repetitions")->capture_default_str();
  run->add_option("--reports", reports_path,
                  "also write the first repetition's reports as group,seed,y (pem)");

  // compare
  auto* compare = app.add_subcommand("compare", "sweep protocols, eps, k and eta");
  DataFlags cmp_data;
  cmp_data.attach(compare);
  std::vector<std::string> protocols;
  std::vector<double> eps_list{1.0};
  std::vector<std::size_t> k_list{16};
  std::vector<unsigned> eta_list;
  std::string cmp_variant = "split";
  double cmp_frac = 0.1;
  unsigned cmp_reps = 1;
  compare->add_option("--protocols", protocols, "comma separated: pem,spm,mcm")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"pem", "spm", "mcm"}));
  compare->add_option("--eps", eps_list, "privacy budgets")->delimiter(',');
  compare->add_option("--k", k_list, "target counts")->delimiter(',');
  compare->add_option("--eta", eta_list, "pem eta values")->delimiter(',');
  compare->add_option("--variant", cmp_variant, "split or partition (baselines)")
      ->check(CLI::IsMember({"split", "partition"}))
      ->capture_default_str();
  compare->add_option("--final-frac", cmp_frac, "held-out user fraction")
      ->capture_default_str();
  compare->add_option("--reps", cmp_reps, "repetitions")->capture_default_str();

  // analyze / optimize
  auto* analyze_cmd = app.add_subcommand("analyze", "analytic utility of a PEM plan");
  auto* optimize_cmd = app.add_subcommand("optimize", "choose the best PEM plan");
  DistFlags model;
  unsigned a_m = 0;
  std::size_t a_k = 16;
  double a_n = 1e6;
  double a_eps = 1.0;
  std::optional<unsigned> a_eta;
  std::string weights = "f1";
  bool vary_cand = false;
  for (auto* cmd : {analyze_cmd, optimize_cmd}) {
    model.attach(cmd);
    cmd->add_option("--m", a_m, "bits per value")->required();
    cmd->add_option("--k", a_k, "heavy hitters to identify")->capture_default_str();
    cmd->add_option("--n", a_n, "number of users")->capture_default_str();
    cmd->add_option("--eps", a_eps, "privacy budget")->capture_default_str();
  }
  analyze_cmd->add_option("--eta", a_eta, "bits added per round; planned when absent");
  optimize_cmd->add_option("--weights", weights, "f1 or ncr")
      ->check(CLI::IsMember({"f1", "ncr"}))
      ->capture_default_str();
  optimize_cmd->add_flag("--vary-cand", vary_cand, "also try |C_i| of 2k and 4k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (*gen) {
    if (global.out == "-") throw InvalidArgument("gen needs --out");
    GeneratorSpec spec{gen_dist.make(), gen_m, gen_n, global.seed};
    const Dataset data = generate(spec);
    std::ostringstream text;
    save(text, data);
    emit(global.out, text.str());
    emit(global.out + ".truth.json", sidecar_json(spec, exact_counts(data), sidecar_top));
    return 0;
  }

  if (*run || *compare) {
    ExperimentSpec spec;
    spec.master_seed = global.seed;
    spec.timing = global.timing;
    Dataset data;
    if (*run) {
      data = run_data.load();
      RunSpec r;
      r.protocol = protocol;
      r.variant = parse_variant(variant);
      r.final_fraction = final_frac;
      r.eps = eps;
      r.k = k;
      r.theta = theta;
      r.eta = eta;
      r.query_limit = global.query_limit;
      spec.runs.push_back(r);
      spec.reps = reps;
      if (!reports_path.empty()) {
        if (protocol != "pem") throw InvalidArgument("--reports is only supported for pem");
        std::ostringstream text;
        const auto records = pem_reports(data, pem_config(data.m, r),
                                         repetition_seed(global.seed, 0));
        write_reports_csv(text, records);
        emit(reports_path, text.str());
      }
    } else {
      data = cmp_data.load();
      if (protocols.empty()) throw InvalidArgument("empty protocol list");
      if (eps_list.empty() || k_list.empty()) throw InvalidArgument("empty sweep");
      spec.reps = cmp_reps;
      for (const auto& proto : protocols) {
        for (double e : eps_list) {
          for (std::size_t kk : k_list) {
            RunSpec r;
            r.protocol = proto;
            r.variant = parse_variant(cmp_variant);
            r.final_fraction = cmp_frac;
            r.eps = e;
            r.k = kk;
            r.query_limit = global.query_limit;
            if (proto == "pem" && !eta_list.empty()) {
              for (unsigned h : eta_list) {
                r.eta = h;
                spec.runs.push_back(r);
              }
            } else {
              spec.runs.push_back(r);
            }
          }
        }
      }
    }
    emit(global.out, render(run_experiment(data, spec), global.format));
    return 0;
  }

  const DistributionSpec dist = model.make();
  const PrivacyBudget budget(a_eps);
  if (*analyze_cmd) {
    const PemConfig cfg =
        a_eta ? PemConfig::uniform(a_m, a_k, *a_eta, global.query_limit, a_eps)
              : plan(a_m, a_k, global.query_limit, budget);
    cfg.validate();
    auto j = to_json(analyze(dist, cfg, a_n));
    j["dist"] = dist.describe();
    j["n"] = a_n;
    emit(global.out, j.dump(2) + "\n");
    return 0;
  }
  const WeightScheme w = weights == "f1" ? WeightScheme::f1(a_k) : WeightScheme::ncr(a_k);
  const PemConfig best =
      optimize(dist, a_m, a_k, a_n, budget, global.query_limit, w, vary_cand);
  const auto result = analyze(dist, best, a_n);
  nlohmann::ordered_json j;
  j["config"] = best.to_json();
  j["queries"] = best.total_queries();
  j["weights"] = weights;
  j["score"] = weights == "f1" ? result.score_f1 : result.score_ncr;
  j["score_f1"] = result.score_f1;
  j["score_ncr"] = result.score_ncr;
  j["dist"] = dist.describe();
  j["n"] = a_n;
  emit(global.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ldphh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ldphh::ErrorKind::kInvalidArgument:
        return kUsage;
      case ldphh::ErrorKind::kInfeasible:
        return kInfeasible;
      case ldphh::ErrorKind::kIo:
        return kIo;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
