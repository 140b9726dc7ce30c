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

#include "dpboot/error.hpp"

namespace dpboot {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kInvalidBounds: return "invalid-bounds";
    case ErrorCode::kInvalidBudget: return "invalid-budget";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kSingularRelease: return "singular-release";
    case ErrorCode::kReplicateFailure: return "replicate-failure";
    case ErrorCode::kUnsupportedEstimator: return "unsupported-estimator";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace dpboot
