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

#ifndef TALDP_SYNTHETIC_H_
#define TALDP_SYNTHETIC_H_

#include <cstdint>

#include "taldp/matrix.h"
#include "taldp/rng.h"

namespace taldp {

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
// diagonal of R made positive).
Matrix RandomOrthogonal(std::size_t n, Rng& rng);

// Points of norm `radius` spread over the sphere: each block of 2n rows is
// +-radius R e_i for an independent random rotation R. When count is a
// multiple of 2n the sample mean is exactly 0 and the second moment is
// exactly radius^2 / n I (up to rounding).
Matrix SphereSample(std::size_t n, std::size_t count, double radius,
                    std::uint64_t seed);

// Independent uniform points on the sphere of the given radius.
Matrix UniformSphere(std::size_t n, std::size_t count, double radius,
                     std::uint64_t seed);

// 24-dimensional rows from a 3-factor linear model with smooth loadings,
// a positive daily-profile mean and small isotropic noise.
Matrix FactorModelSample(std::size_t count, std::uint64_t seed);

struct LabeledSample {
  Matrix inputs;
  Matrix targets;  // one column
};

// n = 6 standard normal inputs; the target depends on the first 3 only.
LabeledSample RegressionSample(std::size_t count, std::uint64_t seed);

// Two Gaussian blobs in 4 dimensions with labels 0 and 1 in equal numbers.
LabeledSample BlobsSample(std::size_t count, std::uint64_t seed);

}  // namespace taldp

#endif  // TALDP_SYNTHETIC_H_
