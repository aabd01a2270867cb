// Copyright 2026 The infotransport Authors.
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

#include "infotransport/error.hpp"

namespace infotransport {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidSpec: return "invalid-spec";
    case ErrorKind::kSamplingFailure: return "sampling-failure";
    case ErrorKind::kEvaluation: return "evaluation-error";
    case ErrorKind::kEmptyCell: return "empty-cell";
    case ErrorKind::kQuadratureFailure: return "quadrature-failure";
    case ErrorKind::kEquilibriumFailure: return "equilibrium-failure";
    case ErrorKind::kMultiplierFailure: return "multiplier-failure";
    case ErrorKind::kSolveFailure: return "solve-failure";
    case ErrorKind::kBuildFailure: return "build-failure";
    case ErrorKind::kEstimation: return "estimation-error";
    case ErrorKind::kTooLarge: return "too-large";
    case ErrorKind::kInfeasible: return "infeasible";
  }
  return "error";
}

}  // namespace infotransport
