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

#include "ldphh/run_result.hpp"

#include "ldphh/error.hpp"

namespace ldphh {

RunMetrics score(const GroundTruth& truth, const RunResult& result,
                 std::size_t k) {
  RunMetrics out;
  out.f1 = f1(truth, result.identified);
  out.ncr = k > 0 && truth.size() >= k ? ncr(truth, result.identified, k) : 0.0;
  try {
    out.var = est_var(truth, result.identified);
  } catch (const InvalidArgument&) {
    out.var.reset();
  }
  return out;
}

nlohmann::ordered_json to_json(const RunResult& result) {
  nlohmann::ordered_json j;
  j["protocol"] = result.protocol;
  if (!result.variant.empty()) j["variant"] = result.variant;
  j["config"] = result.config;
  j["seed"] = result.seed;
  j["identified"] = nlohmann::ordered_json::array();
  for (const auto& s : result.identified) {
    j["identified"].push_back({{"value_hex", s.value.to_hex()},
                               {"estimate", s.count}});
  }
  if (result.metrics) {
    nlohmann::ordered_json m;
    m["f1"] = result.metrics->f1;
    m["ncr"] = result.metrics->ncr;
    m["var"] = result.metrics->var ? nlohmann::ordered_json(*result.metrics->var)
                                   : nlohmann::ordered_json(nullptr);
    j["metrics"] = m;
  }
  j["queries_used"] = result.queries_used;
  if (!result.rounds.empty()) {
    auto& rounds = j["rounds"] = nlohmann::ordered_json::array();
    for (const auto& r : result.rounds) {
      nlohmann::ordered_json c;
      c["round"] = r.round;
      c["prefix_bits"] = r.prefixes.empty() ? 0u : r.prefixes.front().size();
      c["prefixes"] = nlohmann::ordered_json::array();
      for (const auto& p : r.prefixes) c["prefixes"].push_back(p.to_hex());
      c["estimates"] = r.estimates;
      rounds.push_back(std::move(c));
    }
  }
  return j;
}

}  // namespace ldphh
