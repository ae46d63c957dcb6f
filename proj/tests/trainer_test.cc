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

#include <cmath>

#include <gtest/gtest.h>

#include "taldp/error.h"
#include "taldp/mechanism.h"
#include "taldp/synthetic.h"

namespace taldp {
namespace {

NetCodec LinearSeed(std::size_t n, std::size_t z, std::uint64_t seed) {
  NetCodec c;
  c.encoder = Net::Random({n, z}, {Activation::kIdentity}, seed);
  c.decoder = Net::Random({z, n}, {Activation::kIdentity}, seed + 1);
  c.task = Net::Identity(n);
  return c;
}

TrainConfig Config(double epsilon, double eta, int epochs) {
  TrainConfig t;
  t.epsilon = epsilon;
  t.eta = eta;
  t.epochs = epochs;
  t.seed = 42;
  return t;
}

TEST(TrainTaskAwareTest, NoiselessAutoencodingIsLearnable) {
  const Matrix x = SphereSample(2, 200, 1.0, 1);
  const TrainResult r = TrainTaskAware(x, LinearSeed(2, 2, 3), Config(1e9, 0.0, 300));
  EXPECT_LT(r.trace.records.back().loss, 1e-3);
  EXPECT_LT(Evaluate(r.codec, x, 5, 0).mean_loss, 1e-3);
}

TEST(TrainTaskAwareTest, PenaltyShrinksEncoder) {
  const Matrix x = SphereSample(2, 200, 1.0, 2);
  const TrainResult free = TrainTaskAware(x, LinearSeed(2, 2, 5), Config(1.0, 0.0, 60));
  const TrainResult held = TrainTaskAware(x, LinearSeed(2, 2, 5), Config(1.0, 0.2, 60));
  ASSERT_EQ(free.trace.records.size(), held.trace.records.size());
  for (std::size_t i = 0; i < free.trace.records.size(); ++i) {
    EXPECT_LT(held.trace.records[i].enc_norm2, free.trace.records[i].enc_norm2)
        << "epoch " << i;
  }
}

TEST(TrainTaskAwareTest, ZeroEpochsReturnsSeed) {
  const Matrix x = SphereSample(2, 20, 1.0, 3);
  const NetCodec seed = LinearSeed(2, 1, 7);
  const TrainResult r = TrainTaskAware(x, seed, Config(1.0, 0.1, 0));
  EXPECT_EQ(SerializeNet(r.codec.encoder), SerializeNet(seed.encoder));
  EXPECT_EQ(SerializeNet(r.codec.decoder), SerializeNet(seed.decoder));
  EXPECT_TRUE(r.trace.records.empty());
}

TEST(TrainTaskAwareTest, ScaleTracksSensitivityEveryEpoch) {
  const Matrix x = SphereSample(3, 60, 1.0, 4);
  const TrainConfig cfg = Config(2.0, 0.2, 20);
  const TrainResult r = TrainTaskAware(x, LinearSeed(3, 2, 9), cfg);
  for (const EpochRecord& rec : r.trace.records) {
    const double b = rec.delta1 / cfg.epsilon;
    EXPECT_EQ(rec.sigma_w2, 2.0 * b * b);
  }
  const double d1 = SensitivityExact(r.codec.encoder.Forward(x)).delta1;
  EXPECT_EQ(r.codec.delta1, d1);
  EXPECT_EQ(r.trace.records.back().delta1, d1);
  EXPECT_EQ(r.codec.epsilon, cfg.epsilon);
}

TEST(TrainTaskAwareTest, SeededRunsAreBitIdentical) {
  const Matrix x = SphereSample(2, 40, 1.0, 5);
  const TrainResult a = TrainTaskAware(x, LinearSeed(2, 2, 1), Config(3.0, 0.2, 10));
  const TrainResult b = TrainTaskAware(x, LinearSeed(2, 2, 1), Config(3.0, 0.2, 10));
  EXPECT_EQ(a.trace.ToCsv(), b.trace.ToCsv());
  EXPECT_EQ(SerializeNetCodec({a.codec, std::nullopt}),
            SerializeNetCodec({b.codec, std::nullopt}));
  TrainConfig threaded = Config(3.0, 0.2, 10);
  threaded.workers = 3;
  EXPECT_EQ(TrainTaskAware(x, LinearSeed(2, 2, 1), threaded).trace.ToCsv(),
            a.trace.ToCsv());
}

TEST(TrainTaskAwareTest, DivergenceKeepsTrace) {
  const Matrix x = SphereSample(2, 40, 1.0, 6);
  TrainConfig cfg = Config(1.0, 0.0, 50);
  cfg.learning_rate = 1e4;
  try {
    TrainTaskAware(x, LinearSeed(2, 2, 1), cfg);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
    EXPECT_LT(e.trace().records.size(), 50u);
  }
}

TEST(TrainTaskAwareTest, InvalidConfig) {
  const Matrix x = SphereSample(2, 40, 1.0, 6);
  EXPECT_THROW(TrainTaskAware(x, LinearSeed(2, 2, 1), Config(0.0, 0.0, 1)), Error);
  EXPECT_THROW(TrainTaskAware(x, LinearSeed(3, 2, 1), Config(1.0, 0.0, 1)), Error);
}

TEST(TrainPrivacyAgnosticTest, PhasesAndFrozenEncoder) {
  const Matrix x = SphereSample(2, 200, 1.0, 7);
  const int epochs = 300;
  const TrainResult r =
      TrainPrivacyAgnostic(x, LinearSeed(2, 2, 11), Config(2.0, 0.0, epochs));
  ASSERT_EQ(r.trace.records.size(), 2u * epochs);
  for (int i = 0; i < 2 * epochs; ++i) EXPECT_EQ(r.trace.records[i].epoch, i + 1);
  const EpochRecord& end_phase1 = r.trace.records[epochs - 1];
  EXPECT_EQ(end_phase1.sigma_w2, 0.0);
  EXPECT_LT(end_phase1.loss, 1e-3);
  for (int i = epochs; i < 2 * epochs; ++i) {
    EXPECT_EQ(r.trace.records[i].enc_norm2, end_phase1.enc_norm2);
    EXPECT_EQ(r.trace.records[i].delta1, end_phase1.delta1);
  }
}

TEST(TrainPrivacyAgnosticTest, NegligibleNoiseKeepsPhaseOneLoss) {
  // One latent for two dimensions: the noiseless optimum drops half the
  // energy, so the phase-1 loss is far from zero.
  const Matrix x = SphereSample(2, 200, 1.0, 7);
  const int epochs = 300;
  const TrainResult r =
      TrainPrivacyAgnostic(x, LinearSeed(2, 1, 11), Config(1e9, 0.0, epochs));
  const double phase1 = r.trace.records[epochs - 1].loss;
  EXPECT_NEAR(phase1, 0.5, 0.05);
  EXPECT_NEAR(r.trace.records.back().loss, phase1, 0.01 * phase1);
}

TEST(TrainPrivacyAgnosticTest, DecoderAdaptsToNoise) {
  const Matrix x = SphereSample(2, 200, 1.0, 8);
  const TrainResult r =
      TrainPrivacyAgnostic(x, LinearSeed(2, 2, 13), Config(2.0, 0.0, 100));
  const double first_noisy = r.trace.records[100].loss;
  EXPECT_LT(r.trace.records.back().loss, first_noisy);
}

TEST(TrainTaskAgnosticTest, IdentityEncoderConstantSensitivity) {
  const Matrix x = SphereSample(2, 200, 1.0, 9);
  const TrainResult r =
      TrainTaskAgnostic(x, LinearSeed(2, 2, 15), Config(1e9, 0.0, 300));
  const double d1 = SensitivityExact(x).delta1;
  for (const EpochRecord& rec : r.trace.records) EXPECT_EQ(rec.delta1, d1);
  EXPECT_EQ(SerializeNet(r.codec.encoder), SerializeNet(Net::Identity(2)));
  EXPECT_LT(r.trace.records.back().loss, 1e-2);
}

TEST(TrainTaskAgnosticTest, TwoPointRange) {
  const Matrix x{{-0.5}, {2.0}};
  NetCodec seed = LinearSeed(1, 1, 2);
  const TrainResult r = TrainTaskAgnostic(x, seed, Config(1.0, 0.0, 2));
  EXPECT_EQ(r.codec.delta1, 2.5);
}

TEST(EvaluateTest, NoiselessIdentityChain) {
  const Matrix x = SphereSample(3, 30, 1.0, 10);
  NetCodec c;
  c.encoder = Net::Identity(3);
  c.decoder = Net::Identity(3);
  c.task = Net::Identity(3);
  c.delta1 = 0.0;
  const Evaluation ev = Evaluate(c, x, 7, 3);
  EXPECT_EQ(ev.mean_loss, 0.0);
  EXPECT_EQ(ev.std_error, 0.0);
}

TEST(EvaluateTest, StandardErrorScalesWithDraws) {
  const Matrix x = SphereSample(2, 100, 1.0, 11);
  NetCodec c;
  c.encoder = Net::Identity(2);
  c.decoder = Net::Identity(2);
  c.task = Net::Identity(2);
  c.delta1 = 2.0;
  c.epsilon = 1.0;
  const Evaluation k1 = Evaluate(c, x, 100, 5);
  const Evaluation k4 = Evaluate(c, x, 400, 5);
  // Quadrupling the draws halves the standard error.
  EXPECT_NEAR(k4.std_error / k1.std_error, 0.5, 0.05);
  // Identity decoder: the loss is the noise energy 2 sigma_w2.
  EXPECT_NEAR(k4.mean_loss, 2.0 * c.sigma_w2(), 4.0 * k4.std_error);
}

TEST(NetCodecTest, SerializationRoundTrip) {
  NetCodec c = LinearSeed(3, 2, 21);
  c.task = Net::Random({3, 4, 1}, {Activation::kRelu, Activation::kLogistic}, 22);
  c.loss = LossKind::kBinaryCrossEntropy;
  c.delta1 = 1.2345678901234567;
  c.epsilon = 3.0;
  NormalizationSpec spec{NormalizationMode::kJoint, Vector(3, 0.5), Vector(3, 2.0)};
  const std::string text = SerializeNetCodec({c, spec});
  const StoredNetCodec back = DeserializeNetCodec(text);
  EXPECT_EQ(SerializeNetCodec(back), text);
  EXPECT_EQ(back.codec.delta1, c.delta1);
  ASSERT_TRUE(back.normalization.has_value());
  EXPECT_EQ(back.normalization->mode, NormalizationMode::kJoint);
  EXPECT_THROW(DeserializeNetCodec(text.substr(0, 40)), Error);
}

TEST(TrainConfigTest, FromExperiment) {
  ExperimentConfig e;
  e.eta = 0.2;
  e.epochs = 12;
  e.inner_steps = 3;
  e.lr = 0.01;
  e.seed = 9;
  const TrainConfig t = TrainConfig::FromExperiment(e, 4.0);
  EXPECT_EQ(t.epsilon, 4.0);
  EXPECT_EQ(t.eta, 0.2);
  EXPECT_EQ(t.epochs, 12);
  EXPECT_EQ(t.inner_steps, 3);
  EXPECT_EQ(t.learning_rate, 0.01);
  EXPECT_EQ(t.seed, 9u);
}

}  // namespace
}  // namespace taldp
