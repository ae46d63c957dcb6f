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

#include "taldp/neural.h"

#include <cmath>

#include <gtest/gtest.h>

#include "taldp/error.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

// Sum of upstream . output, whose gradient is exactly what Backward computes.
double Contract(const Net& net, const Matrix& x, const Matrix& upstream) {
  const Matrix y = net.Forward(x);
  double s = 0.0;
  for (std::size_t i = 0; i < y.entries().size(); ++i) {
    s += y.entries()[i] * upstream.entries()[i];
  }
  return s;
}

TEST(ForwardTest, IdentityLayer) {
  const Net net = Net::Identity(3);
  const Vector x{1.5, -2, 0.25};
  EXPECT_EQ(net.Forward(x), x);
}

TEST(ForwardTest, Activations) {
  const Net relu({Layer{Matrix::Identity(2), Vector(2, 0.0), Activation::kRelu}});
  EXPECT_EQ(relu.Forward(Vector{-1, 2}), (Vector{0, 2}));
  const Net logistic(
      {Layer{Matrix::Identity(1), Vector(1, 0.0), Activation::kLogistic}});
  EXPECT_EQ(logistic.Forward(Vector{0.0})[0], 0.5);
  // Stable in both tails.
  EXPECT_EQ(logistic.Forward(Vector{-1000.0})[0], 0.0);
  EXPECT_EQ(logistic.Forward(Vector{1000.0})[0], 1.0);
}

TEST(ForwardTest, DimensionErrors) {
  const Net net = Net::Identity(2);
  EXPECT_THROW(net.Forward(Vector{1, 2, 3}), Error);
  EXPECT_THROW(Net({Layer{Matrix(2, 3), Vector(2, 0.0), Activation::kIdentity},
                    Layer{Matrix(1, 3), Vector(1, 0.0), Activation::kIdentity}}),
               Error);
}

TEST(BackwardTest, AffineCalculus) {
  const Matrix w{{1, 2}, {3, 4}, {5, 6}};
  const Net net = Net::Affine(w, Vector{0.1, 0.2, 0.3});
  const Matrix x{{0.5, -1.0}};
  const Matrix g{{1.0, -2.0, 0.5}};
  Tape tape;
  net.Forward(x, &tape);
  NetGradient grad = NetGradient::ZerosLike(net);
  const Matrix dx = net.Backward(tape, g, &grad);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(grad.bias[0][i], g(0, i));
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(grad.weight[0](i, j), g(0, i) * x(0, j));
  }
  const Vector expected = ApplyTransposed(w, g.row(0));
  EXPECT_DOUBLE_EQ(dx(0, 0), expected[0]);
  EXPECT_DOUBLE_EQ(dx(0, 1), expected[1]);
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  const Net net = Net::Random({3, 4, 2}, {Activation::kLogistic, Activation::kIdentity}, 2);
  Tape tape;
  const Matrix x{{0.1, 0.2, 0.3}, {1, -1, 0}};
  net.Forward(x, &tape);
  NetGradient grad = NetGradient::ZerosLike(net);
  const Matrix dx = net.Backward(tape, Matrix(2, 2), &grad);
  EXPECT_EQ(grad.SquaredNorm(), 0.0);
  for (double v : dx.entries()) EXPECT_EQ(v, 0.0);
}

TEST(BackwardTest, ReluKinkUsesZero) {
  const Net net({Layer{Matrix::Identity(1), Vector{0.0}, Activation::kRelu}});
  Tape tape;
  net.Forward(Matrix{{0.0}}, &tape);
  const Matrix dx = net.Backward(tape, Matrix{{1.0}}, nullptr);
  EXPECT_EQ(dx(0, 0), 0.0);
}

TEST(BackwardTest, ForeignTapeRejected) {
  const Net a = Net::Identity(2);
  const Net b = Net::Random({2, 3, 2}, {Activation::kRelu, Activation::kIdentity}, 1);
  Tape tape;
  a.Forward(Matrix{{1, 2}}, &tape);
  try {
    b.Backward(tape, Matrix{{1, 1}}, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTapeMismatch);
  }
}

TEST(BackwardTest, MatchesCentralDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Net net = Net::Random({3, 5, 2}, {Activation::kLogistic, Activation::kIdentity},
                          100 + trial);
    for (auto& layer : net.mutable_layers()) {
      for (double& b : layer.bias) b = rng.Normal() * 0.3;
    }
    Matrix x(4, 3), g(4, 2);
    for (double& v : x.entries()) v = rng.Normal();
    for (double& v : g.entries()) v = rng.Normal();
    Tape tape;
    net.Forward(x, &tape);
    NetGradient grad = NetGradient::ZerosLike(net);
    const Matrix dx = net.Backward(tape, g, &grad);

    const double h = 1e-5;
    auto check = [&](double analytic, double& slot, Net& n, Matrix& in) {
      const double saved = slot;
      slot = saved + h;
      const double up = Contract(n, in, g);
      slot = saved - h;
      const double down = Contract(n, in, g);
      slot = saved;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LE(std::abs(numeric - analytic),
                1e-6 * std::max(1.0, std::abs(numeric)));
    };
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      auto& layer = net.mutable_layers()[l];
      for (std::size_t k = 0; k < layer.weight.entries().size(); ++k) {
        check(grad.weight[l].entries()[k], layer.weight.entries()[k], net, x);
      }
      for (std::size_t k = 0; k < layer.bias.size(); ++k) {
        check(grad.bias[l][k], layer.bias[k], net, x);
      }
    }
    for (std::size_t k = 0; k < x.entries().size(); ++k) {
      check(dx.entries()[k], x.entries()[k], net, x);
    }
  }
}

TEST(LossTest, SquaredL2TaskLoss) {
  const Net f = Net::Identity(2);
  const Matrix x{{1, 2}, {3, 4}};
  const LossValue same = TaskLoss(f, LossKind::kSquaredL2, x, x);
  EXPECT_EQ(same.value, 0.0);
  for (double v : same.gradient.entries()) EXPECT_EQ(v, 0.0);
  const Matrix x_hat{{2, 2}, {3, 6}};
  const LossValue lv = TaskLoss(f, LossKind::kSquaredL2, x_hat, x);
  EXPECT_DOUBLE_EQ(lv.value, (1.0 + 4.0) / 2.0);
  // Gradient of the mean is 2 (x_hat - x) / N.
  EXPECT_DOUBLE_EQ(lv.gradient(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(lv.gradient(1, 1), 2.0);
}

TEST(LossTest, CrossEntropy) {
  const Matrix p{{0.25}};
  const LossValue lv = PredictionLoss(LossKind::kBinaryCrossEntropy, p, Matrix{{1.0}});
  EXPECT_NEAR(lv.value, -std::log(0.25), 1e-15);
  EXPECT_NEAR(lv.gradient(0, 0), -4.0, 1e-12);
  // Clamped away from log(0).
  EXPECT_TRUE(std::isfinite(
      PredictionLoss(LossKind::kBinaryCrossEntropy, Matrix{{0.0}}, Matrix{{1.0}}).value));
  try {
    PredictionLoss(LossKind::kBinaryCrossEntropy, p, Matrix{{1.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadTarget);
  }
  const Vector per = PerSampleLoss(LossKind::kSquaredL2, Matrix{{1}, {3}}, Matrix{{0}, {0}});
  EXPECT_EQ(per, (Vector{1, 9}));
}

TEST(PretrainTest, SeparableTargets) {
  Rng rng(3);
  Matrix x(200, 2), y(200, 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.Normal();
    x(i, 1) = rng.Normal();
    y(i, 0) = x(i, 0) + x(i, 1) > 0 ? 1.0 : 0.0;
    // Widen the margin.
    x(i, 0) += y(i, 0) > 0 ? 1.0 : -1.0;
  }
  const Net init = Net::Random({2, 1}, {Activation::kLogistic}, 4);
  const PretrainResult r =
      PretrainTask(x, y, init, LossKind::kBinaryCrossEntropy, 3000, 0.05);
  EXPECT_LT(r.final_loss, 1e-2);
}

TEST(PretrainTest, ZeroEpochsAndConstantTarget) {
  const Net init = Net::Random({2, 1}, {Activation::kIdentity}, 5);
  Matrix x{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const PretrainResult same = PretrainTask(x, Matrix(4, 1, 3.0), init,
                                           LossKind::kSquaredL2, 0, 0.01);
  EXPECT_EQ(SerializeNet(same.net), SerializeNet(init));
  const PretrainResult fit = PretrainTask(x, Matrix(4, 1, 3.0), init,
                                          LossKind::kSquaredL2, 4000, 0.01);
  EXPECT_NEAR(fit.net.Forward(Vector{0.5, -0.2})[0], 3.0, 1e-3);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Net net = Net::Affine(Matrix{{1.0}}, Vector{0.0});
  Adam adam(net, 0.1);
  NetGradient g = NetGradient::ZerosLike(net);
  g.weight[0](0, 0) = 3.0;
  g.bias[0][0] = -0.5;
  adam.Step(net, g);
  // Bias-corrected moments equal g and g^2 after one step.
  EXPECT_NEAR(net.layers()[0].weight(0, 0), 1.0 - 0.1 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_NEAR(net.layers()[0].bias[0], 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
}

TEST(SerializeNetTest, RoundTrip) {
  Net net = Net::Random({4, 3, 2}, {Activation::kRelu, Activation::kLogistic}, 8);
  net.mutable_layers()[0].bias[1] = 1e-310;
  const std::string text = SerializeNet(net);
  const Net back = DeserializeNet(text);
  EXPECT_EQ(SerializeNet(back), text);
  EXPECT_EQ(back.layers()[0].weight, net.layers()[0].weight);
  EXPECT_EQ(back.layers()[1].activation, Activation::kLogistic);
  EXPECT_THROW(DeserializeNet("taldp-net v1\nlayers 1\n"), Error);
  EXPECT_THROW(DeserializeNet("other"), Error);
}

TEST(ActivationTest, Names) {
  EXPECT_EQ(ParseActivation(ActivationName(Activation::kRelu)), Activation::kRelu);
  EXPECT_EQ(ParseLossKind("bce"), LossKind::kBinaryCrossEntropy);
  EXPECT_EQ(LossKindName(LossKind::kSquaredL2), "squared_l2");
  EXPECT_THROW(ParseActivation("tanh"), Error);
}

}  // namespace
}  // namespace taldp
