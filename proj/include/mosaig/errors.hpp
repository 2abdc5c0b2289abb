// Copyright 2026 The Mosaig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOSAIG_ERRORS_HPP_
#define MOSAIG_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace mosaig {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, unknown vocabulary values, gating violations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A peer (model endpoint or agent) returned something that breaks the
// expected message shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Non-retriable backend failure, or retries exhausted.
class BackendError : public Error {
 public:
  BackendError(std::string endpoint, const std::string& what, bool transient = false)
      : Error(endpoint.empty() ? what : endpoint + ": " + what),
        endpoint_(std::move(endpoint)),
        transient_(transient) {}

  const std::string& endpoint() const { return endpoint_; }
  bool transient() const { return transient_; }

 private:
  std::string endpoint_;
  bool transient_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  CorruptionError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// An upstream stage has not produced the records this step needs.
class IncompleteMatrixError : public Error {
 public:
  explicit IncompleteMatrixError(std::vector<std::string> missing)
      : Error(describe(missing)), missing_(std::move(missing)) {}
  // `hint` names the command that fills the gap.
  IncompleteMatrixError(std::vector<std::string> missing, const std::string& hint)
      : Error(missing.empty() ? "incomplete run: " + hint : describe(missing) + "; " + hint),
        missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  static std::string describe(const std::vector<std::string>& ids) {
    std::string s = "incomplete matrix, missing " + std::to_string(ids.size()) + " record(s)";
    for (std::size_t i = 0; i < ids.size() && i < 8; ++i) s += (i ? ", " : ": ") + ids[i];
    if (ids.size() > 8) s += ", ...";
    return s;
  }
  std::vector<std::string> missing_;
};

class SwapInapplicableError : public Error {
 public:
  using Error::Error;
};

// A statistic whose value is undefined for the given input (zero variance,
// degenerate marginals).
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

}  // namespace mosaig

#endif  // MOSAIG_ERRORS_HPP_
