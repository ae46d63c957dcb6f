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

#include "taldp/trainer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "taldp/mechanism.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

constexpr double kDivergenceLimit = 1e6;

// Stream ids for noise draws; phase 2 of the privacy-agnostic run starts at
// an offset so it never reuses phase-1 streams.
constexpr std::uint64_t kPhaseTwoStream = 1ULL << 32;

Matrix AddNoise(const Matrix& latents, double scale, std::uint64_t seed) {
  Matrix out = latents;
  const Matrix noise =
      LaplaceMechanism(scale, latents.cols(), seed).SampleMatrix(latents.rows());
  for (std::size_t i = 0; i < out.entries().size(); ++i) {
    out.entries()[i] += noise.entries()[i];
  }
  return out;
}

void RequireConfig(const TrainConfig& config) {
  if (!(config.epsilon > 0.0)) {
    throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
  }
  if (config.epochs < 0 || config.inner_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "epochs must be >= 0 and inner_steps >= 1");
  }
  if (!(config.eta >= 0.0) || !(config.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "eta must be >= 0 and the learning rate positive");
  }
}

void RequireData(const NetCodec& codec, const Matrix& data) {
  if (data.cols() != codec.encoder.input_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data has " + std::to_string(data.cols()) +
                    " columns, encoder expects " +
                    std::to_string(codec.encoder.input_dims()));
  }
  if (data.rows() < 2) {
    throw Error(ErrorCode::kEmptyData, "training needs at least 2 samples");
  }
}

double Sensitivity(const Net& encoder, const Matrix& data, int workers) {
  return SensitivityExact(encoder.Forward(data), workers).delta1;
}

class Trainer {
 public:
  Trainer(const Matrix& data, NetCodec codec, const TrainConfig& config)
      : data_(data),
        codec_(std::move(codec)),
        config_(config),
        targets_(codec_.task.Forward(data)),
        enc_adam_(codec_.encoder, config.learning_rate),
        dec_adam_(codec_.decoder, config.learning_rate) {}

  // One full-batch update of the decoder, and of the encoder unless
  // `frozen_latents` supplies its output. Returns the task loss before the
  // step.
  double Step(const Matrix* frozen_latents, const Matrix* noise) {
    const bool train_encoder = frozen_latents == nullptr;
    Tape enc_tape;
    Tape dec_tape;
    Matrix latents = train_encoder ? codec_.encoder.Forward(data_, &enc_tape)
                                   : *frozen_latents;
    if (noise != nullptr) {
      for (std::size_t i = 0; i < latents.entries().size(); ++i) {
        latents.entries()[i] += noise->entries()[i];
      }
    }
    const Matrix x_hat = codec_.decoder.Forward(latents, &dec_tape);
    const LossValue loss =
        TaskLossWithTarget(codec_.task, codec_.loss, x_hat, targets_);
    NetGradient dec_grad = NetGradient::ZerosLike(codec_.decoder);
    const Matrix latent_grad =
        codec_.decoder.Backward(dec_tape, loss.gradient, &dec_grad);
    if (train_encoder) {
      NetGradient enc_grad = NetGradient::ZerosLike(codec_.encoder);
      codec_.encoder.Backward(enc_tape, latent_grad, &enc_grad);
      if (config_.eta > 0.0) {
        const auto& layers = codec_.encoder.layers();
        for (std::size_t l = 0; l < layers.size(); ++l) {
          auto& gw = enc_grad.weight[l].entries();
          const auto& w = layers[l].weight.entries();
          for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += 2.0 * config_.eta * w[i];
          for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
            enc_grad.bias[l][i] += 2.0 * config_.eta * layers[l].bias[i];
          }
        }
      }
      enc_adam_.Step(codec_.encoder, enc_grad);
    }
    dec_adam_.Step(codec_.decoder, dec_grad);
    return loss.value;
  }

  double Loss(const Matrix& latents) const {
    const Matrix x_hat = codec_.decoder.Forward(latents);
    return PredictionLoss(codec_.loss, codec_.task.Forward(x_hat), targets_).value;
  }

  void Record(int epoch, double loss, double sigma_w2) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    rec.delta1 = codec_.delta1;
    rec.sigma_w2 = sigma_w2;
    rec.enc_norm2 = codec_.encoder.SquaredNorm();
    trace_.records.push_back(rec);
    if (!std::isfinite(loss) || loss > kDivergenceLimit ||
        !codec_.encoder.AllFinite() || !codec_.decoder.AllFinite()) {
      throw TrainingDiverged(
          "training diverged at epoch " + std::to_string(epoch), trace_);
    }
  }

  NetCodec& codec() { return codec_; }
  const Matrix& data() const { return data_; }
  TrainResult Finish() { return {std::move(codec_), std::move(trace_)}; }

 private:
  const Matrix& data_;
  NetCodec codec_;
  TrainConfig config_;
  Matrix targets_;
  Adam enc_adam_;
  Adam dec_adam_;
  TrainTrace trace_;
};

}  // namespace

void ValidateCodec(const NetCodec& codec) {
  if (codec.encoder.layers().empty() || codec.decoder.layers().empty() ||
      codec.task.layers().empty()) {
    throw Error(ErrorCode::kInvalidArgument, "codec nets must have layers");
  }
  if (codec.encoder.output_dims() != codec.decoder.input_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "encoder output and decoder input widths differ");
  }
  if (codec.decoder.output_dims() != codec.encoder.input_dims() ||
      codec.task.input_dims() != codec.encoder.input_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "decoder output and task input must match the data width");
  }
  if (!(codec.delta1 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta1 must be non-negative");
  }
}

TrainConfig TrainConfig::FromExperiment(const ExperimentConfig& config,
                                        double epsilon) {
  TrainConfig out;
  out.epsilon = epsilon;
  out.eta = config.eta;
  out.epochs = config.epochs;
  out.inner_steps = config.inner_steps;
  out.learning_rate = config.lr;
  out.seed = config.seed;
  return out;
}

std::string TrainTrace::ToCsv() const {
  std::string out = "epoch,loss,delta1,sigma_w2,enc_norm2\n";
  for (const EpochRecord& r : records) {
    out += std::to_string(r.epoch) + "," + FormatDouble(r.loss) + "," +
           FormatDouble(r.delta1) + "," + FormatDouble(r.sigma_w2) + "," +
           FormatDouble(r.enc_norm2) + "\n";
  }
  return out;
}

TrainResult TrainTaskAware(const Matrix& data, NetCodec seed,
                           const TrainConfig& config) {
  RequireConfig(config);
  ValidateCodec(seed);
  RequireData(seed, data);
  seed.epsilon = config.epsilon;
  if (config.epochs == 0) return {std::move(seed), {}};

  Trainer trainer(data, std::move(seed), config);
  NetCodec& codec = trainer.codec();
  codec.delta1 = Sensitivity(codec.encoder, data, config.workers);
  Matrix noise = LaplaceMechanism(codec.scale(), codec.latent_dims(),
                                  DeriveSeed(config.seed, 0))
                     .SampleMatrix(data.rows());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int s = 0; s < config.inner_steps; ++s) {
      trainer.Step(nullptr, &noise);
    }
    // Recalibrate to the updated encoder and redraw the noise.
    const Matrix latents = codec.encoder.Forward(data);
    codec.delta1 = SensitivityExact(latents, config.workers).delta1;
    noise = LaplaceMechanism(codec.scale(), codec.latent_dims(),
                             DeriveSeed(config.seed, epoch))
                .SampleMatrix(data.rows());
    Matrix noisy = latents;
    for (std::size_t i = 0; i < noisy.entries().size(); ++i) {
      noisy.entries()[i] += noise.entries()[i];
    }
    trainer.Record(epoch, trainer.Loss(noisy), codec.sigma_w2());
  }
  return trainer.Finish();
}

TrainResult TrainPrivacyAgnostic(const Matrix& data, NetCodec seed,
                                 const TrainConfig& config) {
  RequireConfig(config);
  ValidateCodec(seed);
  RequireData(seed, data);
  seed.epsilon = config.epsilon;
  if (config.epochs == 0) return {std::move(seed), {}};

  Trainer trainer(data, std::move(seed), config);
  NetCodec& codec = trainer.codec();
  int epoch = 0;
  for (int e = 0; e < config.epochs; ++e) {
    for (int s = 0; s < config.inner_steps; ++s) {
      trainer.Step(nullptr, nullptr);
    }
    const Matrix latents = codec.encoder.Forward(data);
    codec.delta1 = SensitivityExact(latents, config.workers).delta1;
    trainer.Record(++epoch, trainer.Loss(latents), 0.0);
  }

  // The encoder is frozen from here on.
  const Matrix latents = codec.encoder.Forward(data);
  for (int e = 0; e < config.epochs; ++e) {
    codec.delta1 = SensitivityExact(latents, config.workers).delta1;
    const Matrix noise =
        LaplaceMechanism(codec.scale(), codec.latent_dims(),
                         DeriveSeed(config.seed, kPhaseTwoStream + e))
            .SampleMatrix(data.rows());
    for (int s = 0; s < config.inner_steps; ++s) {
      trainer.Step(&latents, &noise);
    }
    const Matrix noisy = AddNoise(
        latents, codec.scale(),
        DeriveSeed(config.seed, kPhaseTwoStream + config.epochs + e));
    trainer.Record(++epoch, trainer.Loss(noisy), codec.sigma_w2());
  }
  return trainer.Finish();
}

TrainResult TrainTaskAgnostic(const Matrix& data, NetCodec seed,
                              const TrainConfig& config) {
  RequireConfig(config);
  seed.encoder = Net::Identity(data.cols());
  ValidateCodec(seed);
  RequireData(seed, data);
  seed.epsilon = config.epsilon;
  seed.delta1 = SensitivityExact(data, config.workers).delta1;
  if (config.epochs == 0) return {std::move(seed), {}};

  Trainer trainer(data, std::move(seed), config);
  NetCodec& codec = trainer.codec();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const Matrix noise = LaplaceMechanism(codec.scale(), codec.latent_dims(),
                                          DeriveSeed(config.seed, epoch - 1))
                             .SampleMatrix(data.rows());
    for (int s = 0; s < config.inner_steps; ++s) {
      trainer.Step(&data, &noise);
    }
    const Matrix noisy =
        AddNoise(data, codec.scale(), DeriveSeed(config.seed, epoch));
    trainer.Record(epoch, trainer.Loss(noisy), codec.sigma_w2());
  }
  return trainer.Finish();
}

Evaluation Evaluate(const NetCodec& codec, const Matrix& data, int draws,
                    std::uint64_t seed) {
  ValidateCodec(codec);
  RequireData(codec, data);
  if (draws < 1) {
    throw Error(ErrorCode::kInvalidArgument, "noise draws must be at least 1");
  }
  const std::size_t count = data.rows();
  const std::size_t z = codec.latent_dims();
  const double b = codec.scale();
  const Matrix latents = codec.encoder.Forward(data);
  const Matrix targets = codec.task.Forward(data);

  std::vector<Rng> streams;
  streams.reserve(count);
  for (std::size_t i = 0; i < count; ++i) streams.emplace_back(DeriveSeed(seed, i));

  // Welford accumulators per sample; identical draws give exactly zero
  // variance.
  Vector mean(count, 0.0);
  Vector m2(count, 0.0);
  Matrix noisy(count, z);
  for (int d = 0; d < draws; ++d) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t c = 0; c < z; ++c) {
        noisy(i, c) = latents(i, c) + streams[i].Laplace(b);
      }
    }
    const Matrix prediction = codec.task.Forward(codec.decoder.Forward(noisy));
    const Vector losses = PerSampleLoss(codec.loss, prediction, targets);
    for (std::size_t i = 0; i < count; ++i) {
      const double delta = losses[i] - mean[i];
      mean[i] += delta / static_cast<double>(d + 1);
      m2[i] += delta * (losses[i] - mean[i]);
    }
  }

  const double k = static_cast<double>(draws);
  double total = 0.0;
  double variance_sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    total += mean[i];
    if (draws > 1) variance_sum += m2[i] / (k - 1.0);
  }
  Evaluation out;
  out.mean_loss = total / static_cast<double>(count);
  out.std_error = std::sqrt(variance_sum / k) / static_cast<double>(count);
  return out;
}

namespace {

constexpr std::string_view kNetCodecMagic = "taldp-net-codec v1";

[[noreturn]] void BadCodecText(const std::string& what) {
  throw Error(ErrorCode::kParseError, "net codec file: " + what);
}

std::string JoinReals(std::span<const double> values) {
  std::string out;
  for (double v : values) out += " " + FormatDouble(v);
  return out;
}

// "key value..." with the key checked.
std::string ReadField(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) BadCodecText("missing field " + std::string(key));
  if (line.rfind(std::string(key), 0) != 0) {
    BadCodecText("expected field " + std::string(key));
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

Vector ParseReals(const std::string& text, std::size_t count,
                  std::string_view key) {
  Vector out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, v);
      if (ec != std::errc() || ptr != text.data() + end) {
        BadCodecText("malformed number in " + std::string(key));
      }
      out.push_back(v);
    }
    pos = end;
  }
  if (out.size() != count) BadCodecText("wrong value count in " + std::string(key));
  return out;
}

Net ReadNet(std::istream& in, std::string_view section) {
  std::string line;
  if (!std::getline(in, line) || line != section) {
    BadCodecText("expected section " + std::string(section));
  }
  std::string text;
  while (std::getline(in, line)) {
    text += line + "\n";
    if (line == "end") return DeserializeNet(text);
  }
  BadCodecText("unterminated section " + std::string(section));
}

}  // namespace

std::string SerializeNetCodec(const StoredNetCodec& stored) {
  const NetCodec& c = stored.codec;
  std::string out(kNetCodecMagic);
  out += "\nloss " + std::string(LossKindName(c.loss));
  out += "\nepsilon " + FormatDouble(c.epsilon);
  out += "\ndelta1 " + FormatDouble(c.delta1);
  if (stored.normalization) {
    out += "\nnormalization " +
           std::string(NormalizationModeName(stored.normalization->mode));
    out += "\nshift" + JoinReals(stored.normalization->shift);
    out += "\nnorm_scale" + JoinReals(stored.normalization->scale);
  } else {
    out += "\nnormalization none";
  }
  out += "\nencoder\n" + SerializeNet(c.encoder);
  out += "decoder\n" + SerializeNet(c.decoder);
  out += "task\n" + SerializeNet(c.task);
  return out;
}

StoredNetCodec DeserializeNetCodec(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kNetCodecMagic) {
    BadCodecText("missing or unsupported version header");
  }
  StoredNetCodec stored;
  stored.codec.loss = ParseLossKind(ReadField(in, "loss"));
  stored.codec.epsilon = ParseReals(ReadField(in, "epsilon"), 1, "epsilon")[0];
  stored.codec.delta1 = ParseReals(ReadField(in, "delta1"), 1, "delta1")[0];
  const std::string mode = ReadField(in, "normalization");
  std::optional<NormalizationSpec> spec;
  std::string shift_text;
  std::string scale_text;
  if (mode != "none") {
    spec.emplace();
    spec->mode = ParseNormalizationMode(mode);
    shift_text = ReadField(in, "shift");
    scale_text = ReadField(in, "norm_scale");
  }
  stored.codec.encoder = ReadNet(in, "encoder");
  stored.codec.decoder = ReadNet(in, "decoder");
  stored.codec.task = ReadNet(in, "task");
  ValidateCodec(stored.codec);
  if (spec) {
    const std::size_t n = stored.codec.encoder.input_dims();
    spec->shift = ParseReals(shift_text, n, "shift");
    spec->scale = ParseReals(scale_text, n, "norm_scale");
    stored.normalization = std::move(spec);
  }
  return stored;
}

}  // namespace taldp
