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

#include "ldphh/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "ldphh/error.hpp"

namespace ldphh {
namespace {

std::vector<double> normalized(std::vector<double> w) {
  // Summing smallest first keeps long tails accurate.
  const double total = std::accumulate(w.rbegin(), w.rend(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

std::vector<double> zipf_freqs(double s, std::size_t support, std::size_t drop) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("zipf exponent must be positive");
  if (support == 0) throw InvalidArgument("zipf support must be at least 1");
  std::vector<double> w(support);
  for (std::size_t j = 0; j < support; ++j) {
    w[j] = std::pow(static_cast<double>(j + 1 + drop), -s);
  }
  return normalized(std::move(w));
}

std::vector<double> exp_freqs(double rate, std::size_t support) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("exponential rate must be positive");
  }
  if (support == 0) throw InvalidArgument("exponential support must be at least 1");
  std::vector<double> w(support);
  for (std::size_t j = 0; j < support; ++j) {
    w[j] = std::exp(-rate * static_cast<double>(j));
  }
  return normalized(std::move(w));
}

DistributionSpec DistributionSpec::zipf(double s, std::size_t support,
                                        std::size_t drop) {
  DistributionSpec out;
  out.kind_ = Kind::kZipf;
  out.s_ = s;
  out.drop_ = drop;
  out.freqs_ = zipf_freqs(s, support, drop);
  return out;
}

DistributionSpec DistributionSpec::exponential(double rate, std::size_t support) {
  DistributionSpec out;
  out.kind_ = Kind::kExponential;
  out.rate_ = rate;
  out.freqs_ = exp_freqs(rate, support);
  return out;
}

DistributionSpec DistributionSpec::empirical(std::vector<double> freqs) {
  double total = 0.0;
  for (double f : freqs) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw InvalidArgument("frequencies must be finite and non-negative");
    }
    total += f;
  }
  if (total > 1.0 + 1e-9) throw InvalidArgument("frequencies sum above 1");
  std::sort(freqs.begin(), freqs.end(), std::greater<>());
  DistributionSpec out;
  out.freqs_ = std::move(freqs);
  return out;
}

double DistributionSpec::f(std::size_t j) const {
  if (j == 0) throw InvalidArgument("ranks start at 1");
  return j <= freqs_.size() ? freqs_[j - 1] : 0.0;
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kZipf:
      os << "zipf(" << s_ << "," << support();
      if (drop_ > 0) os << ",drop=" << drop_;
      os << ")";
      break;
    case Kind::kExponential:
      os << "exp(" << rate_ << "," << support() << ")";
      break;
    case Kind::kEmpirical:
      os << "empirical(" << support() << ")";
      break;
  }
  return os.str();
}

}  // namespace ldphh
