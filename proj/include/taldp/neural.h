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

#ifndef TALDP_NEURAL_H_
#define TALDP_NEURAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taldp/matrix.h"

namespace taldp {

enum class Activation { kIdentity, kRelu, kLogistic };

std::string_view ActivationName(Activation activation);
Activation ParseActivation(std::string_view text);

// y = act(W x + b), W is out x in.
struct Layer {
  Matrix weight;
  Vector bias;
  Activation activation = Activation::kIdentity;

  std::size_t inputs() const { return weight.cols(); }
  std::size_t outputs() const { return weight.rows(); }
};

// Values recorded by a batched forward pass; rows are samples.
struct Tape {
  std::vector<Matrix> inputs;  // input of each layer
  std::vector<Matrix> pre;     // pre-activation of each layer
  std::vector<Matrix> post;    // output of each layer
};

class Net;

// Parameter-shaped accumulator.
struct NetGradient {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  static NetGradient ZerosLike(const Net& net);
  void Scale(double s);
  // Squared Euclidean norm over all entries.
  double SquaredNorm() const;
};

class Net {
 public:
  Net() = default;
  // Throws kDimensionMismatch when consecutive layers do not chain.
  explicit Net(std::vector<Layer> layers);

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  // dims has one more entry than activations.
  static Net Random(const std::vector<std::size_t>& dims,
                    const std::vector<Activation>& activations,
                    std::uint64_t seed);
  // Single identity-activation layer computing W x + b.
  static Net Affine(Matrix weight, Vector bias);
  static Net Identity(std::size_t n);

  std::size_t input_dims() const;
  std::size_t output_dims() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  // Rows are samples. The tape, when given, is overwritten.
  Matrix Forward(const Matrix& x, Tape* tape = nullptr) const;
  Vector Forward(std::span<const double> x) const;

  // Reverse pass for the tape of a matching Forward. Parameter gradients are
  // added into `grad` (may be null); the input gradient is returned.
  // relu'(0) is taken as 0. Throws kTapeMismatch on a foreign tape.
  Matrix Backward(const Tape& tape, const Matrix& upstream,
                  NetGradient* grad) const;

  // Sum of squared weights and biases.
  double SquaredNorm() const;
  bool AllFinite() const;

 private:
  std::vector<Layer> layers_;
};

enum class LossKind { kSquaredL2, kBinaryCrossEntropy };

std::string_view LossKindName(LossKind kind);
LossKind ParseLossKind(std::string_view text);

struct LossValue {
  double value = 0.0;  // mean over samples
  Matrix gradient;     // d value / d prediction, same shape as prediction
};

// Per-sample loss l(prediction, target) averaged over rows. Squared l2 sums
// the squared error over components; cross entropy sums over components and
// clamps predictions to [1e-12, 1 - 1e-12]. Throws kBadTarget for cross
// entropy targets outside [0, 1].
LossValue PredictionLoss(LossKind kind, const Matrix& prediction,
                         const Matrix& target);

// Loss of each row, without averaging.
Vector PerSampleLoss(LossKind kind, const Matrix& prediction,
                     const Matrix& target);

// l(f(x_hat), f(x)) averaged over rows, with the gradient with respect to
// x_hat. The task net is not modified.
LossValue TaskLoss(const Net& task, LossKind kind, const Matrix& x_hat,
                   const Matrix& x);
// Same with explicit targets for f(x_hat).
LossValue TaskLossWithTarget(const Net& task, LossKind kind,
                             const Matrix& x_hat, const Matrix& target);

// Adam with beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8.
class Adam {
 public:
  Adam(const Net& net, double learning_rate);
  void Step(Net& net, const NetGradient& grad);

 private:
  double lr_;
  int t_ = 0;
  NetGradient m_;
  NetGradient v_;
};

struct PretrainResult {
  Net net;
  double final_loss = 0.0;
};

// Full-batch Adam on (inputs, targets). Throws kNonFinite on divergence.
PretrainResult PretrainTask(const Matrix& inputs, const Matrix& targets,
                            Net initial, LossKind kind, int epochs,
                            double learning_rate);

// Versioned text format with 17 significant digits.
std::string SerializeNet(const Net& net);
Net DeserializeNet(std::string_view text);

}  // namespace taldp

#endif  // TALDP_NEURAL_H_
