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

#ifndef TALDP_MECHANISM_H_
#define TALDP_MECHANISM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "taldp/matrix.h"

namespace taldp {

// Maximum pairwise l1 distance over a set of encoded samples.
struct SensitivityReport {
  double delta1 = 0.0;
  std::size_t arg_i = 0;  // attaining pair, lowest (i, j) on ties
  std::size_t arg_j = 0;
  std::size_t samples = 0;
};

// Exact O(N^2) scan over all row pairs. With workers > 1 the outer loop is
// partitioned across threads; the reduction keeps the lowest index pair on
// ties, so the result does not depend on the worker count.
SensitivityReport SensitivityExact(const Matrix& encoded, int workers = 1);

// l1 diameter of the point set via the identity
//   max_{a,b} |a - b|_1 = max_{s in {-1,1}^Z} (max_a s.a - min_b s.b),
// costing O(2^Z N). Useful for large N with small Z.
double L1DiameterSignTrick(const Matrix& points);

// l1 diameter of the ellipsoid {diag(sigma) v : |v|_2 <= r}, i.e.
// 2 r sqrt(sum sigma_i^2).
double SensitivityEllipsoid(double r, std::span<const double> sigmas);

class LaplaceMechanism {
 public:
  LaplaceMechanism(double scale, std::size_t dim, std::uint64_t seed)
      : scale_(scale), dim_(dim), seed_(seed) {}

  double scale() const { return scale_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  // Per-coordinate noise variance, 2 b^2.
  double sigma_w2() const { return 2.0 * scale_ * scale_; }

  // `count` vectors of i.i.d. Laplace(0, b) coordinates drawn from a fresh
  // stream seeded with seed(); repeated calls return the same vectors.
  std::vector<Vector> Sample(std::size_t count) const;

  // Same stream, laid out as a count x dim matrix.
  Matrix SampleMatrix(std::size_t count) const;

 private:
  double scale_;
  std::size_t dim_;
  std::uint64_t seed_;
};

// b = delta1 / epsilon.
LaplaceMechanism Calibrate(double delta1, double epsilon, std::size_t dim,
                           std::uint64_t seed = 0);

// |log p(z | phi) - log p(z | phi')| for the product Laplace density with
// the mechanism's scale.
double LdpDensityCheck(const LaplaceMechanism& mech, std::span<const double> phi,
                       std::span<const double> phi_prime,
                       std::span<const double> z);

// Key-value text report: delta1, arg_i, arg_j, b, sigma_w2, epsilon.
std::string FormatMechanismReport(const SensitivityReport& sensitivity,
                                  const LaplaceMechanism& mech, double epsilon);

}  // namespace taldp

#endif  // TALDP_MECHANISM_H_
