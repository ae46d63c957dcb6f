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

#ifndef TALDP_WHITENING_H_
#define TALDP_WHITENING_H_

#include <span>

#include "taldp/matrix.h"
#include "taldp/numerics.h"

namespace taldp {

// Mean and Cholesky factor of the sample covariance: h = L^{-1}(x - mean).
struct WhiteningModel {
  Vector mean;
  Matrix factor;        // lower-triangular L, L L^T = covariance + jitter I
  double jitter = 0.0;  // diagonal loading that was needed, 0 if none

  std::size_t dims() const { return mean.size(); }

  static WhiteningModel Identity(std::size_t n);
};

// Unbiased sample covariance (divides by N-1). When the covariance is not
// numerically positive definite, jitter starting at 1e-10 * trace / n is
// added to the diagonal and doubled until the factorization succeeds.
WhiteningModel FitWhitening(const Matrix& data);

Vector Whiten(const WhiteningModel& model, std::span<const double> x);
Vector Unwhiten(const WhiteningModel& model, std::span<const double> h);
Matrix WhitenRows(const WhiteningModel& model, const Matrix& data);
Matrix UnwhitenRows(const WhiteningModel& model, const Matrix& whitened);

// Sample mean and unbiased covariance of the rows.
Vector SampleMean(const Matrix& data);
Matrix SampleCovariance(const Matrix& data);

// Task matrix in whitened coordinates, P = K L, with the spectrum of P^T P.
struct WhitenedTask {
  Matrix task;         // P, m x n
  Vector eigenvalues;  // non-increasing, clipped at zero
  Matrix eigenvectors; // Q, columns pair with eigenvalues
};

WhitenedTask BuildTask(const WhiteningModel& model, const Matrix& task_matrix);

struct RadiusBounds {
  double r_min = 0.0;
  double r_max = 0.0;
  double r_used = 0.0;
  bool r_min_exact = false;  // facet enumeration (n <= 3) vs. axis heuristic
};

// r_max is the largest sample norm. r_min is the radius of the largest
// centered ball inside the empirical convex hull: exact by facet enumeration
// for n <= 3, otherwise the smallest support value over the 2n coordinate
// directions. r_used is r_max.
RadiusBounds ComputeRadiusBounds(const Matrix& whitened);

// Radius of the largest origin-centered ball inside the convex hull of the
// rows (n = 1, 2 or 3). Zero when the origin is not interior.
double InscribedCenteredRadius(const Matrix& points);

}  // namespace taldp

#endif  // TALDP_WHITENING_H_
