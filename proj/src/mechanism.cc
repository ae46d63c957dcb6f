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

#include "taldp/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "taldp/data_io.h"
#include "taldp/error.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

// Best pair among rows i in [begin, end), j > i.
SensitivityReport ScanRows(const Matrix& encoded, std::size_t begin,
                           std::size_t end) {
  SensitivityReport best;
  bool found = false;
  for (std::size_t i = begin; i < end; ++i) {
    const auto a = encoded.row(i);
    for (std::size_t j = i + 1; j < encoded.rows(); ++j) {
      const double d = L1Distance(a, encoded.row(j));
      if (!found || d > best.delta1) {
        best.delta1 = d;
        best.arg_i = i;
        best.arg_j = j;
        found = true;
      }
    }
  }
  return best;
}

bool Better(const SensitivityReport& a, const SensitivityReport& b) {
  if (a.delta1 != b.delta1) return a.delta1 > b.delta1;
  if (a.arg_i != b.arg_i) return a.arg_i < b.arg_i;
  return a.arg_j < b.arg_j;
}

}  // namespace

SensitivityReport SensitivityExact(const Matrix& encoded, int workers) {
  const std::size_t n = encoded.rows();
  if (n < 2) {
    throw Error(ErrorCode::kEmptyData,
                "sensitivity needs at least 2 samples, got " + std::to_string(n));
  }
  if (!AllFinite(encoded)) {
    throw Error(ErrorCode::kNonFinite, "encoded samples contain non-finite values");
  }
  const std::size_t threads =
      std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, n - 1);
  SensitivityReport result;
  if (threads == 1) {
    result = ScanRows(encoded, 0, n - 1);
  } else {
    // Row i costs n - i - 1 pairs; split so each block gets a similar share.
    std::vector<std::size_t> bounds{0};
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n && bounds.size() < threads; ++i) {
      acc += static_cast<double>(n - i - 1);
      if (acc >= total * static_cast<double>(bounds.size()) /
                     static_cast<double>(threads)) {
        bounds.push_back(i + 1);
      }
    }
    bounds.push_back(n - 1);
    std::vector<SensitivityReport> partial(bounds.size() - 1);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < bounds.size(); ++t) {
      pool.emplace_back([&, t] {
        partial[t] = bounds[t] < bounds[t + 1]
                         ? ScanRows(encoded, bounds[t], bounds[t + 1])
                         : SensitivityReport{-1.0, 0, 0, 0};
      });
    }
    for (auto& th : pool) th.join();
    result = partial[0];
    for (const auto& p : partial) {
      if (Better(p, result)) result = p;
    }
  }
  result.samples = n;
  return result;
}

double L1DiameterSignTrick(const Matrix& points) {
  const std::size_t z = points.cols();
  if (points.rows() == 0) {
    throw Error(ErrorCode::kEmptyData, "diameter needs at least one sample");
  }
  if (z > 24) {
    throw Error(ErrorCode::kInvalidArgument,
                "sign enumeration supports at most 24 dimensions");
  }
  // s and -s give the same value, so fix the sign of the first coordinate.
  const std::uint64_t patterns = z == 0 ? 1 : (std::uint64_t{1} << (z - 1));
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < points.rows(); ++r) {
      const auto row = points.row(r);
      double s = 0.0;
      for (std::size_t c = 0; c < z; ++c) {
        s += (c > 0 && (mask >> (c - 1)) & 1U) ? -row[c] : row[c];
      }
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

double SensitivityEllipsoid(double r, std::span<const double> sigmas) {
  double sum = 0.0;
  for (double s : sigmas) sum += s * s;
  return 2.0 * r * std::sqrt(sum);
}

std::vector<Vector> LaplaceMechanism::Sample(std::size_t count) const {
  Rng rng(seed_);
  std::vector<Vector> out(count, Vector(dim_, 0.0));
  for (auto& v : out) {
    for (double& x : v) x = rng.Laplace(scale_);
  }
  return out;
}

Matrix LaplaceMechanism::SampleMatrix(std::size_t count) const {
  Rng rng(seed_);
  Matrix out(count, dim_);
  for (double& x : out.entries()) x = rng.Laplace(scale_);
  return out;
}

LaplaceMechanism Calibrate(double delta1, double epsilon, std::size_t dim,
                           std::uint64_t seed) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
  }
  if (!(delta1 >= 0.0) || !std::isfinite(delta1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensitivity must be finite and non-negative");
  }
  return LaplaceMechanism(delta1 / epsilon, dim, seed);
}

double LdpDensityCheck(const LaplaceMechanism& mech, std::span<const double> phi,
                       std::span<const double> phi_prime,
                       std::span<const double> z) {
  if (phi.size() != phi_prime.size() || phi.size() != z.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "density check vectors must have equal length");
  }
  bool same = std::equal(phi.begin(), phi.end(), phi_prime.begin());
  if (same) return 0.0;
  const double b = mech.scale();
  if (b == 0.0) {
    throw Error(ErrorCode::kScaleZero,
                "zero-scale mechanism cannot separate distinct outputs");
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    diff += std::abs(z[i] - phi_prime[i]) - std::abs(z[i] - phi[i]);
  }
  return std::abs(diff / b);
}

std::string FormatMechanismReport(const SensitivityReport& sensitivity,
                                  const LaplaceMechanism& mech, double epsilon) {
  std::string out;
  out += "delta1 = " + FormatDouble(sensitivity.delta1) + "\n";
  out += "arg_i = " + std::to_string(sensitivity.arg_i) + "\n";
  out += "arg_j = " + std::to_string(sensitivity.arg_j) + "\n";
  out += "b = " + FormatDouble(mech.scale()) + "\n";
  out += "sigma_w2 = " + FormatDouble(mech.sigma_w2()) + "\n";
  out += "epsilon = " + FormatDouble(epsilon) + "\n";
  out += "samples = " + std::to_string(sensitivity.samples) + "\n";
  out += "# sensitivity is measured on the supplied samples only\n";
  return out;
}

}  // namespace taldp
