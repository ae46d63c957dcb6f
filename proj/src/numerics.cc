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

#include "taldp/numerics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "taldp/error.h"

namespace taldp {
namespace {

void RequireSquare(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()) + ", expected square");
  }
}

void RequireSymmetric(const Matrix& m, const char* what) {
  RequireSquare(m, what);
  if (!AllFinite(m)) {
    throw Error(ErrorCode::kNonFinite, std::string(what) + ": non-finite entry");
  }
  if (!IsSymmetric(m)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": matrix is not symmetric");
  }
}

double OffDiagonalNorm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

bool IsSymmetric(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  double scale = 1.0;
  for (double x : m.entries()) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tolerance * scale) return false;
    }
  }
  return true;
}

Matrix Cholesky(const Matrix& spd) {
  RequireSymmetric(spd, "cholesky");
  const std::size_t n = spd.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, spd(i, i));
  const double tolerance = kPivotTolerance * max_diag;

  Matrix lower(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > tolerance) || max_diag <= 0.0) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "cholesky: pivot " + std::to_string(j) + " is " +
                      std::to_string(pivot) + ", matrix is not positive definite");
    }
    const double diag = std::sqrt(pivot);
    lower(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      // Average the two triangles so slightly asymmetric input stays stable.
      double s = 0.5 * (spd(i, j) + spd(j, i));
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / diag;
    }
  }
  return lower;
}

EigenDecomposition SymEig(const Matrix& sym, int max_sweeps) {
  RequireSymmetric(sym, "sym_eig");
  const std::size_t n = sym.rows();
  Matrix a = sym;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = a(j, i) = 0.5 * (sym(i, j) + sym(j, i));
    }
  }
  Matrix v = Matrix::Identity(n);

  const double scale = std::max(FrobeniusNorm(a), 1e-300);
  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    if (OffDiagonalNorm(a) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        // Rotation angle that annihilates a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && OffDiagonalNorm(a) > 1e-15 * scale) {
    throw Error(ErrorCode::kNoConvergence,
                "sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) > a(y, y);
  });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > 1e-12) {
        sign = v(i, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

Matrix SolveSpd(const Matrix& spd, const Matrix& rhs) {
  if (spd.rows() != rhs.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "solve_spd: rhs has " + std::to_string(rhs.rows()) +
                    " rows, system has " + std::to_string(spd.rows()));
  }
  const Matrix lower = Cholesky(spd);
  Matrix x(rhs.rows(), rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    const Vector col = rhs.column(j);
    const Vector y = LowerTriInverseApply(lower, col);
    const Vector sol = LowerTriTransposeInverseApply(lower, y);
    for (std::size_t i = 0; i < sol.size(); ++i) x(i, j) = sol[i];
  }
  return x;
}

Vector LowerTriInverseApply(const Matrix& lower, std::span<const double> v) {
  RequireSquare(lower, "lower_tri_inverse_apply");
  const std::size_t n = lower.rows();
  if (v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "lower_tri_inverse_apply: vector length " +
                    std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (lower(i, i) == 0.0 || !std::isfinite(lower(i, i))) {
      throw Error(ErrorCode::kSingularTriangular,
                  "lower_tri_inverse_apply: zero diagonal at " + std::to_string(i));
    }
    double s = v[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * x[k];
    x[i] = s / lower(i, i);
  }
  return x;
}

Vector LowerTriTransposeInverseApply(const Matrix& lower,
                                     std::span<const double> v) {
  RequireSquare(lower, "lower_tri_transpose_inverse_apply");
  const std::size_t n = lower.rows();
  if (v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "lower_tri_transpose_inverse_apply: vector length mismatch");
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    if (lower(ii, ii) == 0.0 || !std::isfinite(lower(ii, ii))) {
      throw Error(ErrorCode::kSingularTriangular,
                  "lower_tri_transpose_inverse_apply: zero diagonal at " +
                      std::to_string(ii));
    }
    double s = v[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

}  // namespace taldp
