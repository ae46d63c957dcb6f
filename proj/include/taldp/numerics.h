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

#ifndef TALDP_NUMERICS_H_
#define TALDP_NUMERICS_H_

#include <span>

#include "taldp/matrix.h"

namespace taldp {

// Symmetry tolerance applied to inputs of Cholesky and SymEig, scaled by
// max(1, max |entry|).
inline constexpr double kSymmetryTolerance = 1e-9;

// Pivots must exceed this fraction of the largest diagonal entry.
inline constexpr double kPivotTolerance = 1e-12;

// Lower-triangular L with positive diagonal such that L L^T = spd.
// Throws kNotPositiveDefinite on a pivot at or below tolerance.
Matrix Cholesky(const Matrix& spd);

struct EigenDecomposition {
  Vector values;   // non-increasing
  Matrix vectors;  // column k pairs with values[k]
};

// Cyclic Jacobi eigensolver for symmetric input. Each eigenvector column is
// sign-normalized so that its first nonzero entry is non-negative.
EigenDecomposition SymEig(const Matrix& sym, int max_sweeps = 100);

// Solves spd * X = rhs through a Cholesky factorization.
Matrix SolveSpd(const Matrix& spd, const Matrix& rhs);

// Forward substitution: returns x with lower * x = v.
Vector LowerTriInverseApply(const Matrix& lower, std::span<const double> v);

// Back substitution with the transpose of a lower-triangular factor:
// returns x with lower^T * x = v.
Vector LowerTriTransposeInverseApply(const Matrix& lower,
                                     std::span<const double> v);

bool IsSymmetric(const Matrix& m, double tolerance = kSymmetryTolerance);

}  // namespace taldp

#endif  // TALDP_NUMERICS_H_
