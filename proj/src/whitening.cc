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

#include "taldp/whitening.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "taldp/error.h"

namespace taldp {

WhiteningModel WhiteningModel::Identity(std::size_t n) {
  return {Vector(n, 0.0), Matrix::Identity(n), 0.0};
}

Vector SampleMean(const Matrix& data) {
  Vector mean(data.cols(), 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) mean[c] += data(r, c);
  }
  for (double& m : mean) m /= static_cast<double>(data.rows());
  return mean;
}

Matrix SampleCovariance(const Matrix& data) {
  const std::size_t n = data.cols();
  const Vector mean = SampleMean(data);
  Matrix cov(n, n);
  Vector centered(n);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) centered[c] = data(r, c) - mean[c];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) cov(i, j) += centered[i] * centered[j];
    }
  }
  const double denom = static_cast<double>(data.rows()) - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

WhiteningModel FitWhitening(const Matrix& data) {
  const std::size_t n = data.cols();
  if (n == 0 || data.rows() < n + 1 || data.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "whitening needs at least n+1 = " + std::to_string(n + 1) +
                    " samples, got " + std::to_string(data.rows()));
  }
  if (!AllFinite(data)) {
    throw Error(ErrorCode::kNonFinite, "whitening input has non-finite entries");
  }
  WhiteningModel model;
  model.mean = SampleMean(data);
  const Matrix cov = SampleCovariance(data);
  try {
    model.factor = Cholesky(cov);
    return model;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPositiveDefinite) throw;
  }
  const double trace = Trace(cov);
  double jitter = trace > 0.0 ? 1e-10 * trace / static_cast<double>(n) : 1e-10;
  for (int attempt = 0; attempt < 200; ++attempt, jitter *= 2.0) {
    Matrix loaded = cov;
    for (std::size_t i = 0; i < n; ++i) loaded(i, i) += jitter;
    try {
      model.factor = Cholesky(loaded);
      model.jitter = jitter;
      return model;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotPositiveDefinite) throw;
    }
  }
  throw Error(ErrorCode::kNotPositiveDefinite,
              "covariance could not be regularized to positive definite");
}

Vector Whiten(const WhiteningModel& model, std::span<const double> x) {
  if (x.size() != model.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "whiten: sample has " + std::to_string(x.size()) +
                    " entries, model expects " + std::to_string(model.dims()));
  }
  Vector centered(x.begin(), x.end());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] -= model.mean[i];
  return LowerTriInverseApply(model.factor, centered);
}

Vector Unwhiten(const WhiteningModel& model, std::span<const double> h) {
  if (h.size() != model.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "unwhiten: vector has " + std::to_string(h.size()) +
                    " entries, model expects " + std::to_string(model.dims()));
  }
  Vector x = Apply(model.factor, h);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += model.mean[i];
  return x;
}

Matrix WhitenRows(const WhiteningModel& model, const Matrix& data) {
  Matrix out(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const Vector h = Whiten(model, data.row(r));
    std::copy(h.begin(), h.end(), out.row(r).begin());
  }
  return out;
}

Matrix UnwhitenRows(const WhiteningModel& model, const Matrix& whitened) {
  Matrix out(whitened.rows(), whitened.cols());
  for (std::size_t r = 0; r < whitened.rows(); ++r) {
    const Vector x = Unwhiten(model, whitened.row(r));
    std::copy(x.begin(), x.end(), out.row(r).begin());
  }
  return out;
}

WhitenedTask BuildTask(const WhiteningModel& model, const Matrix& task_matrix) {
  if (task_matrix.cols() != model.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "task matrix has " + std::to_string(task_matrix.cols()) +
                    " columns, data dimension is " + std::to_string(model.dims()));
  }
  WhitenedTask out;
  out.task = Multiply(task_matrix, model.factor);
  Matrix gram = MultiplyTransposeA(out.task, out.task);
  // Exact symmetry for the eigensolver.
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) gram(j, i) = gram(i, j);
  }
  EigenDecomposition eig = SymEig(gram);
  for (double& v : eig.values) v = std::max(v, 0.0);
  out.eigenvalues = std::move(eig.values);
  out.eigenvectors = std::move(eig.vectors);
  return out;
}

RadiusBounds ComputeRadiusBounds(const Matrix& whitened) {
  if (whitened.rows() == 0 || whitened.cols() == 0) {
    throw Error(ErrorCode::kEmptyData, "radius bounds need at least one sample");
  }
  RadiusBounds bounds;
  for (std::size_t r = 0; r < whitened.rows(); ++r) {
    bounds.r_max = std::max(bounds.r_max, Norm2(whitened.row(r)));
  }
  const std::size_t n = whitened.cols();
  if (n <= 3) {
    bounds.r_min = InscribedCenteredRadius(whitened);
    bounds.r_min_exact = true;
  } else {
    double support_min = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < whitened.rows(); ++r) {
        hi = std::max(hi, whitened(r, c));
        lo = std::min(lo, whitened(r, c));
      }
      support_min = std::min({support_min, hi, -lo});
    }
    bounds.r_min = std::max(0.0, support_min);
  }
  bounds.r_min = std::min(bounds.r_min, bounds.r_max);
  bounds.r_used = bounds.r_max;
  return bounds;
}

}  // namespace taldp
