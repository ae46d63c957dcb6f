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

#ifndef TALDP_HARNESS_H_
#define TALDP_HARNESS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taldp/data_io.h"
#include "taldp/linear_solver.h"
#include "taldp/matrix.h"
#include "taldp/neural.h"

namespace taldp {

struct ResultRow {
  double epsilon = 0.0;
  std::string approach;  // aware, task-agnostic, privacy-agnostic
  double mean_loss = 0.0;
  double std_error = 0.0;
  double delta1 = 0.0;
  double sigma_w2 = 0.0;
  int z = 0;  // Z' for the task-aware linear codec, otherwise the latent width
};

struct DimensionRow {
  double epsilon = 0.0;
  std::string approach;
  Vector mse;
};

struct ExperimentResult {
  std::string name;
  std::vector<ResultRow> rows;
  std::vector<DimensionRow> per_dimension;  // mean estimation only
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string data_fingerprint;

  // '#'-prefixed provenance lines, then
  // epsilon,approach,mean_loss,std_error,delta1,sigma_w2,z.
  std::string ToCsv() const;
  // epsilon,approach,mse_0,...; empty string without per-dimension rows.
  std::string PerDimensionCsv() const;
  std::string ToJson() const;
};

// FNV-1a of the canonical config text, as 16 hex digits.
std::string ConfigHash(const ExperimentConfig& config);
// FNV-1a of the 17-digit CSV rendering of the values.
std::string DataFingerprint(const Matrix& values);

// k_i = 2 for zero-based indices 8..19 (hours 9 to 20), 1 elsewhere.
Vector DaytimeWeights();

// Normalizes with config.mode, whitens, builds K = diag(weights) and runs
// the three closed-form codecs per epsilon in config.epsilon_grid. Losses
// are Monte-Carlo estimates with config.noise_draws draws per sample in
// normalized units. z_pa is the privacy-agnostic latent width.
ExperimentResult RunMeanEstimation(const Matrix& data, const Vector& weights,
                                   const ExperimentConfig& config, int z_pa = 3);

struct TheoryTable {
  std::string name;
  Vector eigenvalues;
  std::vector<CurveRow> rows;
};

// Three spectra with lambda_1 = 4 and lambda_{2..4} in {0, 1, 2}, evaluated
// at radius r over the grid with a privacy-agnostic width of 2.
std::vector<TheoryTable> RunTheoryFigure(double r, const Vector& epsilon_grid);

struct GeneralSpec {
  LossKind loss = LossKind::kSquaredL2;
  Activation task_output = Activation::kIdentity;
  int task_hidden = 0;         // 0 selects ceil(1.5 n)
  int task_epochs = 2000;
  double task_learning_rate = 1e-2;
  int codec_hidden = 0;        // 0 gives single-layer linear encoder/decoder
  double train_fraction = 0.7;
};

// Pretrains the task net, then per epsilon trains the task-aware,
// task-agnostic and privacy-agnostic codecs on the training split and
// evaluates them on the held-out split.
ExperimentResult RunGeneralExperiment(const Matrix& inputs,
                                      const Matrix& targets,
                                      const GeneralSpec& spec,
                                      const ExperimentConfig& config);

}  // namespace taldp

#endif  // TALDP_HARNESS_H_
