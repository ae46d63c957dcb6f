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

#ifndef TALDP_ERROR_H_
#define TALDP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace taldp {

enum class ErrorCode {
  // Input validation.
  kInvalidArgument,
  kDimensionMismatch,
  kParseError,
  kRaggedRows,
  kIo,
  kConstantColumn,
  kTooFewSamples,
  kEmptyData,
  kNonPositiveEpsilon,
  kBadLatentDim,
  kBadTarget,
  kTapeMismatch,
  // Numerical failure.
  kNotPositiveDefinite,
  kNoConvergence,
  kSingularTriangular,
  kSingularNoiselessEncoder,
  kAllEigenvaluesZero,
  kScaleZero,
  kNonFinite,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for codes that signal a numerical failure rather than bad input.
bool IsNumericalFailure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace taldp

#endif  // TALDP_ERROR_H_
