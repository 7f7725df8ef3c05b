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

#ifndef LDPHH_ERROR_HPP_
#define LDPHH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ldphh {

// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // exit 2
  kInfeasible,       // exit 3
  kIo,               // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

// No configuration satisfies the query limit (or other resource bounds).
class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what)
      : Error(ErrorKind::kInfeasible, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace ldphh

#endif  // LDPHH_ERROR_HPP_
