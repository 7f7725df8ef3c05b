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

#ifndef LDPHH_DISTRIBUTION_HPP_
#define LDPHH_DISTRIBUTION_HPP_

#include <string>
#include <vector>

namespace ldphh {

// f_j proportional to (j + drop)^-s for j = 1..support, normalized.
std::vector<double> zipf_freqs(double s, std::size_t support, std::size_t drop);
// f_j proportional to exp(-rate (j - 1)) for j = 1..support, normalized.
std::vector<double> exp_freqs(double rate, std::size_t support);

// Rank-ordered frequency model shared by the generator and the analysis.
class DistributionSpec {
 public:
  enum class Kind { kZipf, kExponential, kEmpirical };

  static DistributionSpec zipf(double s, std::size_t support,
                               std::size_t drop = 0);
  static DistributionSpec exponential(double rate, std::size_t support);
  // Frequencies are sorted into non-increasing order; their sum must not
  // exceed 1.
  static DistributionSpec empirical(std::vector<double> freqs);

  Kind kind() const noexcept { return kind_; }
  double s() const noexcept { return s_; }
  std::size_t drop() const noexcept { return drop_; }
  double rate() const noexcept { return rate_; }
  std::size_t support() const noexcept { return freqs_.size(); }

  // Frequency of the j-th most frequent value, j >= 1; 0 past the support.
  double f(std::size_t j) const;
  const std::vector<double>& freqs() const noexcept { return freqs_; }

  // "zipf(1.5,1024,drop=20)" style label.
  std::string describe() const;

 private:
  Kind kind_ = Kind::kEmpirical;
  double s_ = 0.0;
  std::size_t drop_ = 0;
  double rate_ = 0.0;
  std::vector<double> freqs_;
};

}  // namespace ldphh

#endif  // LDPHH_DISTRIBUTION_HPP_
