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

#include "taldp/synthetic.h"

#include <cmath>
#include <numbers>

#include "taldp/error.h"

namespace taldp {

Matrix RandomOrthogonal(std::size_t n, Rng& rng) {
  Matrix q(n, n);
  for (double& x : q.entries()) x = rng.Normal();
  // Modified Gram-Schmidt on the columns; keeping the projections positive
  // matches the sign-fixed QR and yields the Haar measure.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw Error(ErrorCode::kNoConvergence, "degenerate Gaussian draw");
    }
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

Matrix SphereSample(std::size_t n, std::size_t count, double radius,
                    std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  Rng rng(seed);
  Matrix out(count, n);
  std::size_t row = 0;
  while (row < count) {
    const Matrix rot = RandomOrthogonal(n, rng);
    for (std::size_t axis = 0; axis < n && row < count; ++axis) {
      for (double sign : {1.0, -1.0}) {
        if (row == count) break;
        for (std::size_t c = 0; c < n; ++c) out(row, c) = sign * radius * rot(c, axis);
        ++row;
      }
    }
  }
  return out;
}

Matrix UniformSphere(std::size_t n, std::size_t count, double radius,
                     std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  Rng rng(seed);
  Matrix out(count, n);
  for (std::size_t r = 0; r < count; ++r) {
    auto row = out.row(r);
    double norm = 0.0;
    while (norm < 1e-12) {
      for (double& x : row) x = rng.Normal();
      norm = Norm2(row);
    }
    for (double& x : row) x *= radius / norm;
  }
  return out;
}

Matrix FactorModelSample(std::size_t count, std::uint64_t seed) {
  constexpr std::size_t kDims = 24;
  constexpr double kPi = std::numbers::pi;
  Rng rng(seed);
  Matrix out(count, kDims);
  for (std::size_t r = 0; r < count; ++r) {
    const double base = rng.Normal();
    const double daytime = rng.Normal();
    const double evening = rng.Normal();
    for (std::size_t t = 0; t < kDims; ++t) {
      const double hour = static_cast<double>(t);
      const double mean = 1.0 + 0.5 * std::sin(kPi * (hour - 6.0) / 12.0);
      const double day_load = std::exp(-0.5 * std::pow((hour - 13.0) / 3.5, 2));
      const double evening_load = std::exp(-0.5 * std::pow((hour - 19.5) / 2.0, 2));
      out(r, t) = mean + 0.3 * base + 0.6 * day_load * daytime +
                  0.5 * evening_load * evening + 0.1 * rng.Normal();
    }
  }
  return out;
}

LabeledSample RegressionSample(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  LabeledSample out{Matrix(count, 6), Matrix(count, 1)};
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < 6; ++c) out.inputs(r, c) = rng.Normal();
    const auto x = out.inputs.row(r);
    out.targets(r, 0) = 1.0 * x[0] - 0.7 * x[1] + 0.4 * x[2] +
                        0.2 * std::tanh(x[0] * x[1]) + 0.05 * rng.Normal();
  }
  return out;
}

LabeledSample BlobsSample(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  LabeledSample out{Matrix(count, 4), Matrix(count, 1)};
  const double center[4] = {1.5, -1.0, 0.5, 0.0};
  for (std::size_t r = 0; r < count; ++r) {
    const double label = static_cast<double>(r % 2);
    const double sign = label > 0.5 ? 1.0 : -1.0;
    for (std::size_t c = 0; c < 4; ++c) {
      out.inputs(r, c) = sign * center[c] + 0.7 * rng.Normal();
    }
    out.targets(r, 0) = label;
  }
  return out;
}

}  // namespace taldp
