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

#include "ldphh/datagen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ldphh/error.hpp"
#include "ldphh/random.hpp"

namespace ldphh {
namespace {

BitValue random_value(unsigned m, Rng& rng) {
  std::array<std::uint8_t, BitValue::kMaxBits / 8> bytes{};
  for (std::size_t i = 0; i < (m + 7) / 8; i += 8) {
    std::uint64_t r = rng();
    for (std::size_t b = 0; b < 8 && i + b < bytes.size(); ++b) {
      bytes[i + b] = static_cast<std::uint8_t>(r >> (56 - 8 * b));
    }
  }
  return BitValue::from_bytes(bytes, m);
}

void check_width(unsigned m) {
  if (m == 0 || m > BitValue::kMaxBits) {
    throw InvalidArgument("value width must be in [1, " +
                          std::to_string(BitValue::kMaxBits) + "] bits");
  }
}

}  // namespace

Dataset generate(const GeneratorSpec& spec) {
  check_width(spec.m);
  if (spec.n == 0) throw InvalidArgument("dataset size must be at least 1");
  const std::size_t support = spec.dist.support();
  if (support == 0) throw InvalidArgument("distribution has empty support");
  if (spec.m < 64 && support > (std::uint64_t{1} << spec.m)) {
    throw InvalidArgument("support of " + std::to_string(support) +
                          " exceeds the 2^" + std::to_string(spec.m) +
                          " value domain");
  }

  Rng value_rng(derive_seed(spec.master_seed, Stream::kDatasetValues));
  std::vector<BitValue> distinct;
  distinct.reserve(support);
  std::unordered_set<BitValue> seen;
  while (distinct.size() < support) {
    BitValue v = random_value(spec.m, value_rng);
    if (seen.insert(v).second) distinct.push_back(v);
  }

  const auto& f = spec.dist.freqs();
  std::vector<double> cumulative(f.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) cumulative[j] = acc += f[j];

  Rng sample_rng(derive_seed(spec.master_seed, Stream::kDatasetSamples));
  Dataset out;
  out.m = spec.m;
  out.values.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = sample_rng.unit() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t j = std::min<std::size_t>(it - cumulative.begin(), support - 1);
    out.values.push_back(distinct[j]);
  }
  return out;
}

Dataset load(std::istream& in, unsigned m, LoadMode mode) {
  check_width(m);
  Dataset out;
  out.m = m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      if (mode == LoadMode::kInt) {
        if (line.empty()) throw InvalidArgument("empty line");
        out.values.push_back(BitValue::from_decimal(line, m));
      } else {
        const auto* bytes = reinterpret_cast<const std::uint8_t*>(line.data());
        out.values.push_back(BitValue::from_bytes({bytes, line.size()}, m));
      }
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read failure");
  if (out.values.empty()) throw InvalidArgument("dataset contains no values");
  return out;
}

Dataset load(const std::string& path, unsigned m, LoadMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return load(in, m, mode);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void save(std::ostream& out, const Dataset& data) {
  for (const auto& v : data.values) out << v.to_decimal() << '\n';
  if (!out) throw IoError("write failure");
}

GroundTruth exact_counts(const Dataset& data) {
  std::unordered_map<BitValue, std::uint64_t> counts;
  for (const auto& v : data.values) ++counts[v];
  std::vector<ScoredValue> ranked;
  ranked.reserve(counts.size());
  for (const auto& [v, c] : counts) {
    ranked.push_back({v, static_cast<double>(c)});
  }
  return GroundTruth(std::move(ranked));
}

std::string sidecar_json(const GeneratorSpec& spec, const GroundTruth& truth,
                         std::size_t top) {
  nlohmann::ordered_json dist;
  switch (spec.dist.kind()) {
    case DistributionSpec::Kind::kZipf:
      dist = {{"kind", "zipf"}, {"s", spec.dist.s()}, {"drop", spec.dist.drop()}};
      break;
    case DistributionSpec::Kind::kExponential:
      dist = {{"kind", "exp"}, {"rate", spec.dist.rate()}};
      break;
    case DistributionSpec::Kind::kEmpirical:
      dist = {{"kind", "empirical"}};
      break;
  }
  dist["support"] = spec.dist.support();

  nlohmann::ordered_json j;
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["dist"] = dist;
  j["seed"] = spec.master_seed;
  j["true_topk"] = nlohmann::ordered_json::array();
  const GroundTruth head = truth.top(top);
  for (const auto& s : head.ranked()) {
    j["true_topk"].push_back(
        {{"value_hex", s.value.to_hex()},
         {"count", static_cast<std::uint64_t>(s.count)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace ldphh
