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

#ifndef TALDP_LINEAR_SOLVER_H_
#define TALDP_LINEAR_SOLVER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taldp/linear_codec.h"
#include "taldp/matrix.h"
#include "taldp/whitening.h"

namespace taldp {

// D = E^T (E E^T + sigma_w2 I)^{-1}. Throws kSingularNoiselessEncoder when
// the system is singular, which can only happen for (near) zero noise.
Matrix OptimalDecoder(const Matrix& encoder, double sigma_w2);

// Loss of the optimal decoder in whitened coordinates,
//   Tr(P^T P) - Tr(P^T P E^T (E E^T + sigma_w2 I)^{-1} E).
double OptimalDecoderLoss(const Matrix& task, const Matrix& encoder,
                          double sigma_w2);

// Expected task loss E|P(D(E h + w) - h)|^2 for white h and any decoder:
//   Tr(P (DE - I)(DE - I)^T P^T) + sigma_w2 Tr(P D D^T P^T).
double DecoderLoss(const Matrix& task, const Matrix& encoder,
                   const Matrix& decoder, double sigma_w2);

// sum_i lambda_i sigma_w2 / (sigma_i^2 + sigma_w2). A direction with
// sigma_i^2 = 0 contributes lambda_i; with sigma_w2 = 0 and sigma_i^2 > 0 it
// contributes 0.
double LossGivenSigmas(std::span<const double> lambda,
                       std::span<const double> sigma2, double sigma_w2);

struct SolveReport {
  Vector eigenvalues;
  int z_prime = 0;
  Vector sigma2;  // length n, zero beyond z_prime, sums to m
  double m = 1.0;
  double noise_ratio = 0.0;  // c = 8 r^2 / epsilon^2
  double sigma_w2 = 0.0;
  double delta1 = 0.0;
  double epsilon = 0.0;
  double predicted_loss = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  bool r_min_exact = false;
  // Some index had its admission test within 1e-12 of zero.
  bool tie_flagged = false;
  // All eigenvalues are zero; the codec transmits nothing.
  bool zero_task = false;
};

// Optimal scale allocation on a centered sphere of radius r. Z' is the
// largest k with sqrt(lambda_k)(1 + k c) - c S_k > 0, where S_k is the sum of
// the first k square roots (a value within 1e-12 of zero is a tie and does
// not admit k), and
//   sigma_i^2 = M (sqrt(lambda_i)(1 + Z' c) / S_{Z'} - c),  i <= Z',
//   loss = c / (1 + Z' c) S_{Z'}^2 + sum_{i > Z'} lambda_i,
//   sigma_w2 = c M.
SolveReport KktSigmas(std::span<const double> lambda, double r, double epsilon,
                      double m = 1.0);

// Closed-form losses on a centered sphere of radius r. TaskAwareSphereLoss
// returns 0 for r == 0 and for an all-zero spectrum.
double TaskAwareSphereLoss(std::span<const double> lambda, double r,
                           double epsilon);
double TaskAgnosticSphereLoss(std::span<const double> lambda, double r,
                              double epsilon);
double PrivacyAgnosticSphereLoss(std::span<const double> lambda, double r,
                                 double epsilon, int z);

struct LinearSolution {
  LinearCodec codec;
  SolveReport report;
};

// Closed-form task-aware codec. `whitened` holds the whitened training rows.
// The encoder is sized for the sphere through the farthest sample, then the
// noise is recalibrated to the sensitivity measured on the encoded rows.
LinearSolution SolveTaskAware(const WhiteningModel& model,
                              const Matrix& task_matrix, const Matrix& whitened,
                              double epsilon, int workers = 1);

// Noise added to the centered input itself (E = L in whitened coordinates).
LinearSolution SolveTaskAgnostic(const WhiteningModel& model,
                                 const Matrix& task_matrix,
                                 const Matrix& whitened, double epsilon,
                                 int workers = 1);

// Top-z principal directions of P^T P with equal scales 1/z.
LinearSolution SolvePrivacyAgnostic(const WhiteningModel& model,
                                    const Matrix& task_matrix,
                                    const Matrix& whitened, double epsilon,
                                    int z, int workers = 1);

struct CurveRow {
  double epsilon = 0.0;
  double task_aware = 0.0;
  double task_agnostic = 0.0;
  double privacy_agnostic = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

// Sphere losses of the three approaches over an epsilon grid. The bounds use
// r_min (defaults to r) and r.
std::vector<CurveRow> TheoryCurves(std::span<const double> lambda, double r,
                                   std::span<const double> epsilon_grid,
                                   int z_pa,
                                   std::optional<double> r_min = std::nullopt);

// CSV with header epsilon,inv_epsilon,loss_task_aware,loss_task_agnostic,
// loss_privacy_agnostic,lower_bound,upper_bound.
std::string FormatCurves(const std::vector<CurveRow>& rows);

// Key-value report of a solve.
std::string FormatSolveReport(const SolveReport& report);

}  // namespace taldp

#endif  // TALDP_LINEAR_SOLVER_H_
