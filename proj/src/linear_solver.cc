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

#include "taldp/linear_solver.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "taldp/data_io.h"
#include "taldp/error.h"
#include "taldp/mechanism.h"
#include "taldp/numerics.h"

namespace taldp {
namespace {

double NoiseRatio(double r, double epsilon) {
  return 8.0 * r * r / (epsilon * epsilon);
}

void RequireEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
  }
}

void RequireSpectrum(std::span<const double> lambda) {
  if (lambda.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "eigenvalue list is empty");
  }
  for (double l : lambda) {
    if (!std::isfinite(l) || l < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "eigenvalues must be finite and non-negative");
    }
  }
}

Vector SortedDescending(std::span<const double> lambda) {
  Vector sorted(lambda.begin(), lambda.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted;
}

double Sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void RequireWhitenedRows(const WhiteningModel& model, const Matrix& whitened) {
  if (whitened.cols() != model.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "whitened data has " + std::to_string(whitened.cols()) +
                    " columns, model expects " + std::to_string(model.dims()));
  }
}

LinearCodec MakeCodec(Approach approach, const WhiteningModel& model,
                      const Matrix& task_matrix, Matrix encoder, Matrix decoder,
                      double epsilon, double delta1) {
  LinearCodec codec;
  codec.approach = approach;
  codec.encoder = std::move(encoder);
  codec.decoder = std::move(decoder);
  codec.epsilon = epsilon;
  codec.delta1 = delta1;
  codec.scale = delta1 / epsilon;
  codec.sigma_w2 = 2.0 * codec.scale * codec.scale;
  codec.whitening = model;
  codec.task_matrix = task_matrix;
  return codec;
}

// Fills the fields shared by every solve.
SolveReport BaseReport(const WhitenedTask& task, const RadiusBounds& bounds,
                       double epsilon) {
  SolveReport report;
  report.eigenvalues = task.eigenvalues;
  report.epsilon = epsilon;
  report.r_min = bounds.r_min;
  report.r_max = bounds.r_max;
  report.r_min_exact = bounds.r_min_exact;
  report.noise_ratio = NoiseRatio(bounds.r_max, epsilon);
  return report;
}

}  // namespace

Matrix OptimalDecoder(const Matrix& encoder, double sigma_w2) {
  if (!(sigma_w2 >= 0.0) || !std::isfinite(sigma_w2)) {
    throw Error(ErrorCode::kInvalidArgument,
                "noise variance must be finite and non-negative");
  }
  Matrix gram = MultiplyTransposeB(encoder, encoder);
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    gram(i, i) += sigma_w2;
    for (std::size_t j = 0; j < i; ++j) gram(j, i) = gram(i, j);
  }
  try {
    return SolveSpd(gram, encoder).Transposed();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPositiveDefinite) throw;
    throw Error(ErrorCode::kSingularNoiselessEncoder,
                "E E^T + sigma_w2 I is singular; the encoder needs full row "
                "rank when the noise is (near) zero");
  }
}

double OptimalDecoderLoss(const Matrix& task, const Matrix& encoder,
                          double sigma_w2) {
  if (task.cols() != encoder.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "task and encoder disagree on the input dimension");
  }
  const Matrix decoder = OptimalDecoder(encoder, sigma_w2);  // E^T A^{-1}
  const Matrix gram = MultiplyTransposeA(task, task);
  // Tr(G E^T A^{-1} E) = Tr(G D E).
  return Trace(gram) - Trace(Multiply(gram, Multiply(decoder, encoder)));
}

double DecoderLoss(const Matrix& task, const Matrix& encoder,
                   const Matrix& decoder, double sigma_w2) {
  const std::size_t n = encoder.cols();
  if (task.cols() != n || decoder.rows() != n ||
      decoder.cols() != encoder.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "task, encoder and decoder shapes do not chain");
  }
  Matrix residual = Multiply(decoder, encoder);
  for (std::size_t i = 0; i < n; ++i) residual(i, i) -= 1.0;
  const Matrix pr = Multiply(task, residual);
  const Matrix pd = Multiply(task, decoder);
  const double fr = FrobeniusNorm(pr);
  const double fd = FrobeniusNorm(pd);
  return fr * fr + sigma_w2 * fd * fd;
}

double LossGivenSigmas(std::span<const double> lambda,
                       std::span<const double> sigma2, double sigma_w2) {
  if (lambda.size() != sigma2.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "eigenvalue and scale lists differ in length");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (sigma2[i] == 0.0) {
      loss += lambda[i];
    } else if (sigma_w2 != 0.0) {
      loss += lambda[i] * sigma_w2 / (sigma2[i] + sigma_w2);
    }
  }
  return loss;
}

SolveReport KktSigmas(std::span<const double> lambda, double r, double epsilon,
                      double m) {
  RequireSpectrum(lambda);
  RequireEpsilon(epsilon);
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    if (lambda[i] > lambda[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "eigenvalues must be sorted in non-increasing order");
    }
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorCode::kInvalidArgument, "total scale M must be positive");
  }
  if (!(lambda[0] > 0.0)) {
    throw Error(ErrorCode::kAllEigenvaluesZero,
                "all eigenvalues are zero; the task ignores the data");
  }

  SolveReport report;
  report.eigenvalues.assign(lambda.begin(), lambda.end());
  report.m = m;
  report.epsilon = epsilon;
  report.r_min = r;
  report.r_max = r;
  const double c = NoiseRatio(r, epsilon);
  report.noise_ratio = c;

  double partial = 0.0;
  double partial_at_z = 0.0;
  for (std::size_t k = 1; k <= lambda.size(); ++k) {
    const double root = std::sqrt(lambda[k - 1]);
    partial += root;
    const double test = root * (1.0 + static_cast<double>(k) * c) - c * partial;
    // A test within rounding of zero is a tie; the index would receive
    // sigma^2 = 0 either way, so it is left out.
    if (std::abs(test) <= 1e-12 * std::max(1.0, c * partial)) {
      report.tie_flagged = true;
    } else if (test > 0.0) {
      report.z_prime = static_cast<int>(k);
      partial_at_z = partial;
    }
  }

  const double zc = 1.0 + static_cast<double>(report.z_prime) * c;
  report.sigma2.assign(lambda.size(), 0.0);
  double tail = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (static_cast<int>(i) < report.z_prime) {
      report.sigma2[i] = m * (std::sqrt(lambda[i]) * zc / partial_at_z - c);
    } else {
      tail += lambda[i];
    }
  }
  report.sigma_w2 = c * m;
  report.predicted_loss = c / zc * partial_at_z * partial_at_z + tail;
  report.lower_bound = report.predicted_loss;
  report.upper_bound = report.predicted_loss;
  report.delta1 = SensitivityEllipsoid(r, std::vector<double>{std::sqrt(m)});
  return report;
}

double TaskAwareSphereLoss(std::span<const double> lambda, double r,
                           double epsilon) {
  RequireSpectrum(lambda);
  RequireEpsilon(epsilon);
  if (!(r >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be non-negative");
  }
  const Vector sorted = SortedDescending(lambda);
  if (r == 0.0 || sorted[0] == 0.0) return 0.0;
  return KktSigmas(sorted, r, epsilon).predicted_loss;
}

double TaskAgnosticSphereLoss(std::span<const double> lambda, double r,
                              double epsilon) {
  RequireSpectrum(lambda);
  RequireEpsilon(epsilon);
  const double nc = static_cast<double>(lambda.size()) * NoiseRatio(r, epsilon);
  return nc / (1.0 + nc) * Sum(lambda);
}

double PrivacyAgnosticSphereLoss(std::span<const double> lambda, double r,
                                 double epsilon, int z) {
  RequireSpectrum(lambda);
  RequireEpsilon(epsilon);
  if (z < 1 || z > static_cast<int>(lambda.size())) {
    throw Error(ErrorCode::kBadLatentDim,
                "latent dimension z must be in 1.." +
                    std::to_string(lambda.size()) + ", got " + std::to_string(z));
  }
  const Vector sorted = SortedDescending(lambda);
  const double zc = static_cast<double>(z) * NoiseRatio(r, epsilon);
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (static_cast<int>(i) < z ? head : tail) += sorted[i];
  }
  return zc / (1.0 + zc) * head + tail;
}

LinearSolution SolveTaskAware(const WhiteningModel& model,
                              const Matrix& task_matrix, const Matrix& whitened,
                              double epsilon, int workers) {
  RequireEpsilon(epsilon);
  RequireWhitenedRows(model, whitened);
  const WhitenedTask task = BuildTask(model, task_matrix);
  const RadiusBounds bounds = ComputeRadiusBounds(whitened);
  const std::size_t n = model.dims();
  SolveReport report = BaseReport(task, bounds, epsilon);

  if (!(task.eigenvalues[0] > 0.0)) {
    report.zero_task = true;
    report.sigma2.assign(n, 0.0);
    LinearCodec codec = MakeCodec(Approach::kTaskAware, model, task_matrix,
                                  Matrix(1, n), Matrix(n, 1), epsilon, 0.0);
    return {std::move(codec), std::move(report)};
  }
  if (!(bounds.r_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "whitened samples all sit at the origin");
  }

  const SolveReport sphere = KktSigmas(task.eigenvalues, bounds.r_max, epsilon);
  report.z_prime = sphere.z_prime;
  report.sigma2 = sphere.sigma2;
  report.m = sphere.m;
  report.tie_flagged = sphere.tie_flagged;
  report.upper_bound = sphere.predicted_loss;
  report.lower_bound = bounds.r_min > 0.0
                           ? TaskAwareSphereLoss(task.eigenvalues, bounds.r_min,
                                                 epsilon)
                           : 0.0;

  // E = diag(sigma) Q^T restricted to the Z' active directions.
  const std::size_t z = static_cast<std::size_t>(sphere.z_prime);
  Matrix encoder(z, n);
  for (std::size_t i = 0; i < z; ++i) {
    const double s = std::sqrt(sphere.sigma2[i]);
    for (std::size_t j = 0; j < n; ++j) encoder(i, j) = s * task.eigenvectors(j, i);
  }
  const Matrix encoded = MultiplyTransposeB(whitened, encoder);
  const SensitivityReport sens = SensitivityExact(encoded, workers);
  LinearCodec codec =
      MakeCodec(Approach::kTaskAware, model, task_matrix, encoder,
                Matrix(), epsilon, sens.delta1);
  codec.decoder = OptimalDecoder(codec.encoder, codec.sigma_w2);
  report.delta1 = sens.delta1;
  report.sigma_w2 = codec.sigma_w2;
  report.predicted_loss =
      LossGivenSigmas(task.eigenvalues, report.sigma2, codec.sigma_w2);
  return {std::move(codec), std::move(report)};
}

LinearSolution SolveTaskAgnostic(const WhiteningModel& model,
                                 const Matrix& task_matrix,
                                 const Matrix& whitened, double epsilon,
                                 int workers) {
  RequireEpsilon(epsilon);
  RequireWhitenedRows(model, whitened);
  const WhitenedTask task = BuildTask(model, task_matrix);
  const RadiusBounds bounds = ComputeRadiusBounds(whitened);
  SolveReport report = BaseReport(task, bounds, epsilon);

  // phi = L h is the centered input.
  const Matrix encoded = MultiplyTransposeB(whitened, model.factor);
  const SensitivityReport sens = SensitivityExact(encoded, workers);
  LinearCodec codec = MakeCodec(Approach::kTaskAgnostic, model, task_matrix,
                                model.factor, Matrix(), epsilon, sens.delta1);
  codec.decoder = OptimalDecoder(codec.encoder, codec.sigma_w2);
  report.z_prime = static_cast<int>(model.dims());
  report.delta1 = sens.delta1;
  report.sigma_w2 = codec.sigma_w2;
  report.predicted_loss =
      OptimalDecoderLoss(task.task, codec.encoder, codec.sigma_w2);
  report.lower_bound = report.predicted_loss;
  report.upper_bound = report.predicted_loss;
  return {std::move(codec), std::move(report)};
}

LinearSolution SolvePrivacyAgnostic(const WhiteningModel& model,
                                    const Matrix& task_matrix,
                                    const Matrix& whitened, double epsilon,
                                    int z, int workers) {
  RequireEpsilon(epsilon);
  RequireWhitenedRows(model, whitened);
  const std::size_t n = model.dims();
  if (z < 1 || z > static_cast<int>(n)) {
    throw Error(ErrorCode::kBadLatentDim,
                "latent dimension z must be in 1.." + std::to_string(n) +
                    ", got " + std::to_string(z));
  }
  const WhitenedTask task = BuildTask(model, task_matrix);
  const RadiusBounds bounds = ComputeRadiusBounds(whitened);
  SolveReport report = BaseReport(task, bounds, epsilon);

  const std::size_t zz = static_cast<std::size_t>(z);
  const double s = std::sqrt(1.0 / static_cast<double>(z));
  Matrix encoder(zz, n);
  for (std::size_t i = 0; i < zz; ++i) {
    for (std::size_t j = 0; j < n; ++j) encoder(i, j) = s * task.eigenvectors(j, i);
  }
  const Matrix encoded = MultiplyTransposeB(whitened, encoder);
  const SensitivityReport sens = SensitivityExact(encoded, workers);
  LinearCodec codec = MakeCodec(Approach::kPrivacyAgnostic, model, task_matrix,
                                encoder, Matrix(), epsilon, sens.delta1);
  codec.decoder = OptimalDecoder(codec.encoder, codec.sigma_w2);
  report.z_prime = z;
  report.sigma2.assign(n, 0.0);
  for (std::size_t i = 0; i < zz; ++i) report.sigma2[i] = 1.0 / static_cast<double>(z);
  report.delta1 = sens.delta1;
  report.sigma_w2 = codec.sigma_w2;
  report.predicted_loss =
      LossGivenSigmas(task.eigenvalues, report.sigma2, codec.sigma_w2);
  report.lower_bound = report.predicted_loss;
  report.upper_bound = report.predicted_loss;
  return {std::move(codec), std::move(report)};
}

std::vector<CurveRow> TheoryCurves(std::span<const double> lambda, double r,
                                   std::span<const double> epsilon_grid,
                                   int z_pa, std::optional<double> r_min) {
  RequireSpectrum(lambda);
  if (epsilon_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon grid is empty");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be non-negative");
  }
  const double inner = r_min.value_or(r);
  if (!(inner >= 0.0) || inner > r) {
    throw Error(ErrorCode::kInvalidArgument, "r_min must lie in [0, r]");
  }
  std::vector<CurveRow> rows;
  rows.reserve(epsilon_grid.size());
  for (double epsilon : epsilon_grid) {
    CurveRow row;
    row.epsilon = epsilon;
    row.task_aware = TaskAwareSphereLoss(lambda, r, epsilon);
    row.task_agnostic = TaskAgnosticSphereLoss(lambda, r, epsilon);
    row.privacy_agnostic = PrivacyAgnosticSphereLoss(lambda, r, epsilon, z_pa);
    row.lower_bound = TaskAwareSphereLoss(lambda, inner, epsilon);
    row.upper_bound = row.task_aware;
    rows.push_back(row);
  }
  return rows;
}

std::string FormatCurves(const std::vector<CurveRow>& rows) {
  std::string out =
      "epsilon,inv_epsilon,loss_task_aware,loss_task_agnostic,"
      "loss_privacy_agnostic,lower_bound,upper_bound\n";
  for (const CurveRow& row : rows) {
    out += FormatDouble(row.epsilon) + "," + FormatDouble(1.0 / row.epsilon) +
           "," + FormatDouble(row.task_aware) + "," +
           FormatDouble(row.task_agnostic) + "," +
           FormatDouble(row.privacy_agnostic) + "," +
           FormatDouble(row.lower_bound) + "," + FormatDouble(row.upper_bound) +
           "\n";
  }
  return out;
}

std::string FormatSolveReport(const SolveReport& report) {
  auto list = [](const Vector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += ",";
      s += FormatDouble(v[i]);
    }
    return s;
  };
  std::string out;
  out += "z_prime = " + std::to_string(report.z_prime) + "\n";
  out += "eigenvalues = " + list(report.eigenvalues) + "\n";
  out += "sigma2 = " + list(report.sigma2) + "\n";
  out += "m = " + FormatDouble(report.m) + "\n";
  out += "epsilon = " + FormatDouble(report.epsilon) + "\n";
  out += "delta1 = " + FormatDouble(report.delta1) + "\n";
  out += "sigma_w2 = " + FormatDouble(report.sigma_w2) + "\n";
  out += "predicted_loss = " + FormatDouble(report.predicted_loss) + "\n";
  out += "lower_bound = " + FormatDouble(report.lower_bound) + "\n";
  out += "upper_bound = " + FormatDouble(report.upper_bound) + "\n";
  out += "r_min = " + FormatDouble(report.r_min) + "\n";
  out += "r_max = " + FormatDouble(report.r_max) + "\n";
  out += std::string("r_min_exact = ") + (report.r_min_exact ? "true" : "false") + "\n";
  out += std::string("tie_flagged = ") + (report.tie_flagged ? "true" : "false") + "\n";
  out += std::string("zero_task = ") + (report.zero_task ? "true" : "false") + "\n";
  out += "# sensitivity is measured on the training samples only\n";
  return out;
}

}  // namespace taldp
