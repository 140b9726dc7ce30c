// Copyright 2026 The dpboot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPBOOT_ERROR_HPP_
#define DPBOOT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dpboot {

// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  kInvalidParameter = 1,
  kInvalidBounds,
  kInvalidBudget,
  kShape,
  kEmptyInput,
  kNumericalFailure,
  kSingularRelease,
  kReplicateFailure,
  kUnsupportedEstimator,
  kInvalidConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the last iterate of a solver that did not converge.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& message, std::vector<double> last_iterate)
      : Error(ErrorCode::kNumericalFailure, message),
        last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept {
    return last_iterate_;
  }

 private:
  std::vector<double> last_iterate_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dpboot

#endif  // DPBOOT_ERROR_HPP_
