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

#ifndef LDPHH_HARNESS_HPP_
#define LDPHH_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldphh/baselines.hpp"
#include "ldphh/datagen.hpp"
#include "ldphh/metrics.hpp"
#include "ldphh/pem.hpp"
#include "ldphh/run_result.hpp"

namespace ldphh {

// One protocol invocation.
struct RunSpec {
  std::string protocol = "pem";  // pem | spm | mcm
  BaselineVariant variant = BaselineVariant::kSplit;
  double final_fraction = 0.1;
  double eps = 1.0;
  std::size_t k = 16;
  std::optional<double> theta;  // PEM threshold variant; k becomes ceil(1/theta)
  std::optional<unsigned> eta;  // PEM only; planned when absent
  std::uint64_t query_limit = std::uint64_t{1} << 20;
};

// The PEM configuration a run spec resolves to.
PemConfig pem_config(unsigned m, const RunSpec& spec);

// Runs one repetition and scores it against the dataset's exact counts.
RunResult run_protocol(const Dataset& data, const GroundTruth& counts,
                       const RunSpec& spec, std::uint64_t seed);

struct ResultRow {
  std::string protocol;
  std::string variant;
  double eps = 0.0;
  std::size_t k = 0;
  std::optional<double> theta;
  std::string seed;  // repetition seed, or "mean" / "std"
  double f1 = 0.0;
  double ncr = 0.0;
  std::optional<double> est_var;
  double queries = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "protocol,variant,eps,k,theta,seed,f1,ncr,est_var,queries,wall_ms";

std::string to_csv(const ResultRow& row);

struct ExperimentSpec {
  std::vector<RunSpec> runs;  // in output order
  unsigned reps = 1;
  std::uint64_t master_seed = 1;
  bool timing = false;  // wall_ms stays 0 otherwise, keeping output stable
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;     // per repetition, then mean and std per run
  std::vector<RunResult> results;  // per repetition
};

// Seed of repetition r; shared by every run spec so sweeps compare like with
// like.
std::uint64_t repetition_seed(std::uint64_t master_seed, unsigned r);

ExperimentOutput run_experiment(const Dataset& data, const ExperimentSpec& spec);

}  // namespace ldphh

#endif  // LDPHH_HARNESS_HPP_
