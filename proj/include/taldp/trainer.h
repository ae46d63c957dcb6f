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

#ifndef TALDP_TRAINER_H_
#define TALDP_TRAINER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taldp/data_io.h"
#include "taldp/error.h"
#include "taldp/matrix.h"
#include "taldp/neural.h"

namespace taldp {

// Encoder g_e (n -> Z), decoder g_d (Z -> n) and frozen task f. The released
// value is g_e(x) + w with w ~ Laplace(0, delta1 / epsilon) per coordinate.
struct NetCodec {
  Net encoder;
  Net decoder;
  Net task;
  LossKind loss = LossKind::kSquaredL2;
  double delta1 = 0.0;
  double epsilon = 1.0;

  std::size_t latent_dims() const { return encoder.output_dims(); }
  double scale() const { return delta1 / epsilon; }
  double sigma_w2() const { return 2.0 * scale() * scale(); }
};

// Throws kDimensionMismatch unless encoder, decoder and task chain.
void ValidateCodec(const NetCodec& codec);

struct TrainConfig {
  double epsilon = 1.0;
  double eta = 0.0;  // weight of the |theta_e|^2 penalty
  int epochs = 300;
  int inner_steps = 15;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int workers = 1;  // sensitivity scan threads

  static TrainConfig FromExperiment(const ExperimentConfig& config,
                                    double epsilon);
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // empirical task loss after the epoch's updates
  double delta1 = 0.0;
  double sigma_w2 = 0.0;
  double enc_norm2 = 0.0;
};

struct TrainTrace {
  std::vector<EpochRecord> records;

  // Columns epoch,loss,delta1,sigma_w2,enc_norm2.
  std::string ToCsv() const;
};

struct TrainResult {
  NetCodec codec;
  TrainTrace trace;
};

// Raised when the loss exceeds 1e6 or turns non-finite; keeps the records
// completed so far.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& message, TrainTrace trace)
      : Error(ErrorCode::kNonFinite, message), trace_(std::move(trace)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

// Each epoch runs inner_steps full-batch Adam updates of both nets with the
// noise held fixed, the encoder gradient carrying the extra 2 eta theta_e
// term. Afterwards delta1 is recomputed on the updated encoder and one new
// noise vector per sample is drawn.
TrainResult TrainTaskAware(const Matrix& data, NetCodec seed,
                           const TrainConfig& config);

// Phase 1 trains both nets without noise for config.epochs epochs. Phase 2
// freezes the encoder and trains the decoder on noisy latents for another
// config.epochs epochs. Trace records are numbered across both phases;
// phase-1 records report sigma_w2 = 0.
TrainResult TrainPrivacyAgnostic(const Matrix& data, NetCodec seed,
                                 const TrainConfig& config);

// The encoder is replaced by the identity map, so delta1 is the l1 diameter
// of the data itself; only the decoder is trained.
TrainResult TrainTaskAgnostic(const Matrix& data, NetCodec seed,
                              const TrainConfig& config);

struct Evaluation {
  double mean_loss = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo task loss over `draws` noise draws per sample. Sample i uses
// the stream DeriveSeed(seed, i). The standard error covers the noise only:
// sqrt(sum_i s_i^2 / draws) / N with s_i^2 the variance across draws.
Evaluation Evaluate(const NetCodec& codec, const Matrix& data, int draws,
                    std::uint64_t seed);

// A trained codec together with the input normalization it expects.
struct StoredNetCodec {
  NetCodec codec;
  std::optional<NormalizationSpec> normalization;
};

// Versioned text format embedding the three nets.
std::string SerializeNetCodec(const StoredNetCodec& stored);
StoredNetCodec DeserializeNetCodec(std::string_view text);

}  // namespace taldp

#endif  // TALDP_TRAINER_H_
