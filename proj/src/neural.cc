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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "taldp/data_io.h"
#include "taldp/error.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

constexpr std::string_view kNetMagic = "taldp-net v1";
constexpr double kProbClamp = 1e-12;

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Activate(Activation act, double x) {
  switch (act) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kLogistic: return Logistic(x);
  }
  return x;
}

double Derivative(Activation act, double pre, double post) {
  switch (act) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kLogistic: return post * (1.0 - post);
  }
  return 1.0;
}

void RequireSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()) + " differ");
  }
}

[[noreturn]] void BadNetText(const std::string& what) {
  throw Error(ErrorCode::kParseError, "net file: " + what);
}

// from_chars instead of operator>> so subnormals parse.
bool ReadReal(std::istream& in, double& value) {
  std::string token;
  if (!(in >> token)) return false;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kLogistic: return "logistic";
  }
  return "unknown";
}

Activation ParseActivation(std::string_view text) {
  if (text == "identity") return Activation::kIdentity;
  if (text == "relu") return Activation::kRelu;
  if (text == "logistic") return Activation::kLogistic;
  throw Error(ErrorCode::kInvalidArgument,
              "activation must be identity, relu or logistic, got '" +
                  std::string(text) + "'");
}

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kSquaredL2 ? "squared_l2" : "bce";
}

LossKind ParseLossKind(std::string_view text) {
  if (text == "squared_l2") return LossKind::kSquaredL2;
  if (text == "bce" || text == "binary_cross_entropy") {
    return LossKind::kBinaryCrossEntropy;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "loss must be squared_l2 or bce, got '" + std::string(text) + "'");
}

NetGradient NetGradient::ZerosLike(const Net& net) {
  NetGradient g;
  for (const Layer& layer : net.layers()) {
    g.weight.emplace_back(layer.weight.rows(), layer.weight.cols());
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

void NetGradient::Scale(double s) {
  for (Matrix& w : weight) {
    for (double& x : w.entries()) x *= s;
  }
  for (Vector& b : bias) {
    for (double& x : b) x *= s;
  }
}

double NetGradient::SquaredNorm() const {
  double total = 0.0;
  for (const Matrix& w : weight) {
    for (double x : w.entries()) total += x * x;
  }
  for (const Vector& b : bias) {
    for (double x : b) total += x * x;
  }
  return total;
}

Net::Net(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].outputs()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " bias length differs from its width");
    }
    if (l > 0 && layers_[l].inputs() != layers_[l - 1].outputs()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " does not chain with layer " +
                      std::to_string(l - 1));
    }
  }
}

Net Net::Random(const std::vector<std::size_t>& dims,
                const std::vector<Activation>& activations, std::uint64_t seed) {
  if (dims.size() < 2 || activations.size() + 1 != dims.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need one activation per layer and at least one layer");
  }
  Rng rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] == 0 || dims[l + 1] == 0) {
      throw Error(ErrorCode::kInvalidArgument, "layer widths must be positive");
    }
    Layer layer;
    layer.weight = Matrix(dims[l + 1], dims[l]);
    const double limit =
        std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (double& w : layer.weight.entries()) w = rng.Uniform(-limit, limit);
    layer.bias.assign(dims[l + 1], 0.0);
    layer.activation = activations[l];
    layers.push_back(std::move(layer));
  }
  return Net(std::move(layers));
}

Net Net::Affine(Matrix weight, Vector bias) {
  Layer layer{std::move(weight), std::move(bias), Activation::kIdentity};
  return Net({std::move(layer)});
}

Net Net::Identity(std::size_t n) {
  return Affine(Matrix::Identity(n), Vector(n, 0.0));
}

std::size_t Net::input_dims() const {
  return layers_.empty() ? 0 : layers_.front().inputs();
}

std::size_t Net::output_dims() const {
  return layers_.empty() ? 0 : layers_.back().outputs();
}

Matrix Net::Forward(const Matrix& x, Tape* tape) const {
  if (layers_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "net has no layers");
  }
  if (x.cols() != input_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "net input has " + std::to_string(x.cols()) +
                    " columns, net expects " + std::to_string(input_dims()));
  }
  if (tape != nullptr) {
    tape->inputs.clear();
    tape->pre.clear();
    tape->post.clear();
  }
  Matrix current = x;
  for (const Layer& layer : layers_) {
    Matrix pre = MultiplyTransposeB(current, layer.weight);
    for (std::size_t r = 0; r < pre.rows(); ++r) {
      auto row = pre.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    Matrix post = pre;
    if (layer.activation != Activation::kIdentity) {
      for (double& v : post.entries()) v = Activate(layer.activation, v);
    }
    if (tape != nullptr) {
      tape->inputs.push_back(std::move(current));
      tape->pre.push_back(std::move(pre));
      tape->post.push_back(post);
    }
    current = std::move(post);
  }
  return current;
}

Vector Net::Forward(std::span<const double> x) const {
  const Matrix out = Forward(Matrix(1, x.size(), Vector(x.begin(), x.end())));
  return out.entries();
}

Matrix Net::Backward(const Tape& tape, const Matrix& upstream,
                     NetGradient* grad) const {
  const std::size_t count = layers_.size();
  if (tape.inputs.size() != count || tape.pre.size() != count ||
      tape.post.size() != count) {
    throw Error(ErrorCode::kTapeMismatch, "tape depth does not match the net");
  }
  for (std::size_t l = 0; l < count; ++l) {
    if (tape.inputs[l].cols() != layers_[l].inputs() ||
        tape.pre[l].cols() != layers_[l].outputs() ||
        tape.pre[l].rows() != tape.inputs[0].rows()) {
      throw Error(ErrorCode::kTapeMismatch,
                  "tape layer " + std::to_string(l) + " does not match the net");
    }
  }
  if (upstream.rows() != tape.post.back().rows() ||
      upstream.cols() != output_dims()) {
    throw Error(ErrorCode::kTapeMismatch,
                "upstream gradient shape does not match the tape");
  }
  if (grad != nullptr && (grad->weight.size() != count || grad->bias.size() != count)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gradient accumulator does not match the net");
  }
  Matrix g = upstream;
  for (std::size_t l = count; l-- > 0;) {
    const Layer& layer = layers_[l];
    if (layer.activation != Activation::kIdentity) {
      const auto& pre = tape.pre[l].entries();
      const auto& post = tape.post[l].entries();
      auto& ge = g.entries();
      for (std::size_t i = 0; i < ge.size(); ++i) {
        ge[i] *= Derivative(layer.activation, pre[i], post[i]);
      }
    }
    if (grad != nullptr) {
      const Matrix dw = MultiplyTransposeA(g, tape.inputs[l]);
      auto& acc = grad->weight[l].entries();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += dw.entries()[i];
      for (std::size_t r = 0; r < g.rows(); ++r) {
        const auto row = g.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) grad->bias[l][c] += row[c];
      }
    }
    g = Multiply(g, layer.weight);
  }
  return g;
}

double Net::SquaredNorm() const {
  double total = 0.0;
  for (const Layer& layer : layers_) {
    for (double w : layer.weight.entries()) total += w * w;
    for (double b : layer.bias) total += b * b;
  }
  return total;
}

bool Net::AllFinite() const {
  for (const Layer& layer : layers_) {
    if (!taldp::AllFinite(layer.weight) || !taldp::AllFinite(layer.bias)) {
      return false;
    }
  }
  return true;
}

LossValue PredictionLoss(LossKind kind, const Matrix& prediction,
                         const Matrix& target) {
  RequireSameShape(prediction, target, "loss");
  const std::size_t count = prediction.rows();
  if (count == 0) throw Error(ErrorCode::kEmptyData, "loss needs samples");
  const double inv = 1.0 / static_cast<double>(count);
  LossValue out;
  out.gradient = Matrix(prediction.rows(), prediction.cols());
  const auto& p = prediction.entries();
  const auto& y = target.entries();
  auto& g = out.gradient.entries();
  double total = 0.0;
  if (kind == LossKind::kSquaredL2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] - y[i];
      total += d * d;
      g[i] = 2.0 * d * inv;
    }
  } else {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
        throw Error(ErrorCode::kBadTarget,
                    "cross-entropy target outside [0, 1]");
      }
      const double q = std::clamp(p[i], kProbClamp, 1.0 - kProbClamp);
      total -= y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
      g[i] = (q - y[i]) / (q * (1.0 - q)) * inv;
    }
  }
  out.value = total * inv;
  return out;
}

Vector PerSampleLoss(LossKind kind, const Matrix& prediction,
                     const Matrix& target) {
  RequireSameShape(prediction, target, "loss");
  Vector out(prediction.rows(), 0.0);
  for (std::size_t r = 0; r < prediction.rows(); ++r) {
    const auto p = prediction.row(r);
    const auto y = target.row(r);
    double total = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (kind == LossKind::kSquaredL2) {
        const double d = p[c] - y[c];
        total += d * d;
      } else {
        if (!(y[c] >= 0.0 && y[c] <= 1.0)) {
          throw Error(ErrorCode::kBadTarget, "cross-entropy target outside [0, 1]");
        }
        const double q = std::clamp(p[c], kProbClamp, 1.0 - kProbClamp);
        total -= y[c] * std::log(q) + (1.0 - y[c]) * std::log(1.0 - q);
      }
    }
    out[r] = total;
  }
  return out;
}

LossValue TaskLossWithTarget(const Net& task, LossKind kind,
                             const Matrix& x_hat, const Matrix& target) {
  Tape tape;
  const Matrix prediction = task.Forward(x_hat, &tape);
  LossValue loss = PredictionLoss(kind, prediction, target);
  loss.gradient = task.Backward(tape, loss.gradient, nullptr);
  return loss;
}

LossValue TaskLoss(const Net& task, LossKind kind, const Matrix& x_hat,
                   const Matrix& x) {
  RequireSameShape(x_hat, x, "task loss");
  return TaskLossWithTarget(task, kind, x_hat, task.Forward(x));
}

Adam::Adam(const Net& net, double learning_rate)
    : lr_(learning_rate),
      m_(NetGradient::ZerosLike(net)),
      v_(NetGradient::ZerosLike(net)) {}

void Adam::Step(Net& net, const NetGradient& grad) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, t_);
  const double c2 = 1.0 - std::pow(kBeta2, t_);
  auto update = [&](double& param, double g, double& m, double& v) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g * g;
    param -= lr_ * (m / c1) / (std::sqrt(v / c2) + kEps);
  };
  auto& layers = net.mutable_layers();
  if (grad.weight.size() != layers.size() || m_.weight.size() != layers.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "optimizer state does not match the net");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& w = layers[l].weight.entries();
    for (std::size_t i = 0; i < w.size(); ++i) {
      update(w[i], grad.weight[l].entries()[i], m_.weight[l].entries()[i],
             v_.weight[l].entries()[i]);
    }
    auto& b = layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) {
      update(b[i], grad.bias[l][i], m_.bias[l][i], v_.bias[l][i]);
    }
  }
}

PretrainResult PretrainTask(const Matrix& inputs, const Matrix& targets,
                            Net initial, LossKind kind, int epochs,
                            double learning_rate) {
  if (inputs.rows() != targets.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "inputs and targets differ in sample count");
  }
  if (targets.cols() != initial.output_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "target width differs from the net output");
  }
  PretrainResult result{std::move(initial), 0.0};
  Adam adam(result.net, learning_rate);
  Tape tape;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const Matrix prediction = result.net.Forward(inputs, &tape);
    const LossValue loss = PredictionLoss(kind, prediction, targets);
    if (!std::isfinite(loss.value)) {
      throw Error(ErrorCode::kNonFinite,
                  "task pretraining diverged at epoch " + std::to_string(epoch));
    }
    NetGradient grad = NetGradient::ZerosLike(result.net);
    result.net.Backward(tape, loss.gradient, &grad);
    adam.Step(result.net, grad);
  }
  result.final_loss =
      PredictionLoss(kind, result.net.Forward(inputs), targets).value;
  if (!std::isfinite(result.final_loss) || !result.net.AllFinite()) {
    throw Error(ErrorCode::kNonFinite, "task pretraining produced non-finite values");
  }
  return result;
}

std::string SerializeNet(const Net& net) {
  std::string out(kNetMagic);
  out += "\nlayers " + std::to_string(net.layers().size()) + "\n";
  for (const Layer& layer : net.layers()) {
    out += "layer " + std::to_string(layer.inputs()) + " " +
           std::to_string(layer.outputs()) + " " +
           std::string(ActivationName(layer.activation)) + "\nweights";
    for (double w : layer.weight.entries()) out += " " + FormatDouble(w);
    out += "\nbias";
    for (double b : layer.bias) out += " " + FormatDouble(b);
    out += "\n";
  }
  out += "end\n";
  return out;
}

Net DeserializeNet(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kNetMagic) {
    BadNetText("missing or unsupported version header");
  }
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "layers") BadNetText("expected layer count");
  std::vector<Layer> layers;
  for (std::size_t l = 0; l < count; ++l) {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::string act;
    if (!(in >> word >> inputs >> outputs >> act) || word != "layer") {
      BadNetText("expected layer header " + std::to_string(l));
    }
    Layer layer;
    layer.activation = ParseActivation(act);
    layer.weight = Matrix(outputs, inputs);
    layer.bias.assign(outputs, 0.0);
    if (!(in >> word) || word != "weights") BadNetText("expected weights");
    for (double& w : layer.weight.entries()) {
      if (!ReadReal(in, w)) BadNetText("truncated weights in layer " + std::to_string(l));
    }
    if (!(in >> word) || word != "bias") BadNetText("expected bias");
    for (double& b : layer.bias) {
      if (!ReadReal(in, b)) BadNetText("truncated bias in layer " + std::to_string(l));
    }
    layers.push_back(std::move(layer));
  }
  if (!(in >> word) || word != "end") BadNetText("missing end marker");
  return Net(std::move(layers));
}

}  // namespace taldp
