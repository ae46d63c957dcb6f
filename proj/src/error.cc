// Copyright 2026 The taldp Authors
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

#include "taldp/error.h"

namespace taldp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kRaggedRows: return "RaggedRows";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConstantColumn: return "ConstantColumn";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kNonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::kBadLatentDim: return "BadLatentDim";
    case ErrorCode::kBadTarget: return "BadTarget";
    case ErrorCode::kTapeMismatch: return "TapeMismatch";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kSingularTriangular: return "SingularTriangular";
    case ErrorCode::kSingularNoiselessEncoder: return "SingularNoiselessEncoder";
    case ErrorCode::kAllEigenvaluesZero: return "AllEigenvaluesZero";
    case ErrorCode::kScaleZero: return "ScaleZero";
    case ErrorCode::kNonFinite: return "NonFinite";
  }
  return "Unknown";
}

bool IsNumericalFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPositiveDefinite:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kSingularTriangular:
    case ErrorCode::kSingularNoiselessEncoder:
    case ErrorCode::kAllEigenvaluesZero:
    case ErrorCode::kScaleZero:
    case ErrorCode::kNonFinite:
      return true;
    default:
      return false;
  }
}

}  // namespace taldp
