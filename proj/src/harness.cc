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

#include "taldp/harness.h"

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "taldp/error.h"
#include "taldp/rng.h"
#include "taldp/trainer.h"
#include "taldp/whitening.h"

namespace taldp {
namespace {

void RequireGrid(const ExperimentConfig& config) {
  if (config.epsilon_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon grid is empty");
  }
  for (double e : config.epsilon_grid) {
    if (!(e > 0.0)) {
      throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
    }
  }
}

Matrix SelectRows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Net LinearOrHidden(std::size_t in, std::size_t out, int hidden,
                   std::uint64_t seed) {
  if (hidden <= 0) return Net::Random({in, out}, {Activation::kIdentity}, seed);
  return Net::Random({in, static_cast<std::size_t>(hidden), out},
                     {Activation::kRelu, Activation::kIdentity}, seed);
}

}  // namespace

std::string ConfigHash(const ExperimentConfig& config) {
  return HexDigest(Fnv1a64(FormatConfig(config)));
}

std::string DataFingerprint(const Matrix& values) {
  return HexDigest(Fnv1a64(FormatCsv(values)));
}

std::string ExperimentResult::ToCsv() const {
  std::string out;
  out += "# experiment = " + name + "\n";
  out += "# seed = " + std::to_string(seed) + "\n";
  out += "# config_hash = " + config_hash + "\n";
  out += "# data_fingerprint = " + data_fingerprint + "\n";
  out += "epsilon,approach,mean_loss,std_error,delta1,sigma_w2,z\n";
  for (const ResultRow& r : rows) {
    out += FormatDouble(r.epsilon) + "," + r.approach + "," +
           FormatDouble(r.mean_loss) + "," + FormatDouble(r.std_error) + "," +
           FormatDouble(r.delta1) + "," + FormatDouble(r.sigma_w2) + "," +
           std::to_string(r.z) + "\n";
  }
  return out;
}

std::string ExperimentResult::PerDimensionCsv() const {
  if (per_dimension.empty()) return "";
  std::string out;
  out += "# experiment = " + name + "\n";
  out += "# seed = " + std::to_string(seed) + "\n";
  out += "# config_hash = " + config_hash + "\n";
  out += "# data_fingerprint = " + data_fingerprint + "\n";
  out += "epsilon,approach";
  for (std::size_t d = 0; d < per_dimension.front().mse.size(); ++d) {
    out += ",mse_" + std::to_string(d);
  }
  out += "\n";
  for (const DimensionRow& r : per_dimension) {
    out += FormatDouble(r.epsilon) + "," + r.approach;
    for (double v : r.mse) out += "," + FormatDouble(v);
    out += "\n";
  }
  return out;
}

std::string ExperimentResult::ToJson() const {
  nlohmann::ordered_json doc;
  doc["experiment"] = name;
  doc["provenance"] = {{"seed", seed},
                       {"config_hash", config_hash},
                       {"data_fingerprint", data_fingerprint}};
  auto& list = doc["rows"] = nlohmann::ordered_json::array();
  for (const ResultRow& r : rows) {
    list.push_back({{"epsilon", r.epsilon},
                    {"approach", r.approach},
                    {"mean_loss", r.mean_loss},
                    {"std_error", r.std_error},
                    {"delta1", r.delta1},
                    {"sigma_w2", r.sigma_w2},
                    {"z", r.z}});
  }
  return doc.dump(2) + "\n";
}

Vector DaytimeWeights() {
  Vector k(24, 1.0);
  for (std::size_t i = 8; i <= 19; ++i) k[i] = 2.0;
  return k;
}

ExperimentResult RunMeanEstimation(const Matrix& data, const Vector& weights,
                                   const ExperimentConfig& config, int z_pa) {
  RequireGrid(config);
  if (weights.size() != data.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weights have " + std::to_string(weights.size()) +
                    " entries, data has " + std::to_string(data.cols()) +
                    " columns");
  }
  for (double k : weights) {
    if (!(k > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be positive");
    }
  }
  const NormalizedData normalized = Normalize({data, {}}, config.mode);
  const Matrix& x = normalized.data.values;
  const WhiteningModel model = FitWhitening(x);
  const Matrix h = WhitenRows(model, x);
  const Matrix task = Matrix::Diagonal(weights);

  ExperimentResult result;
  result.name = "mean_estimation";
  result.seed = config.seed;
  result.config_hash = ConfigHash(config);
  result.data_fingerprint = DataFingerprint(data);
  for (std::size_t e = 0; e < config.epsilon_grid.size(); ++e) {
    const double epsilon = config.epsilon_grid[e];
    const LinearSolution solutions[] = {
        SolveTaskAware(model, task, h, epsilon),
        SolveTaskAgnostic(model, task, h, epsilon),
        SolvePrivacyAgnostic(model, task, h, epsilon, z_pa)};
    for (std::size_t a = 0; a < 3; ++a) {
      const LinearSolution& sol = solutions[a];
      const LinearEvaluation eval = EvaluateLinearCodec(
          sol.codec, x, config.noise_draws, DeriveSeed(config.seed, 3 * e + a));
      const std::string approach(ApproachName(sol.codec.approach));
      result.rows.push_back({epsilon, approach, eval.mean_loss, eval.std_error,
                             sol.codec.delta1, sol.codec.sigma_w2,
                             sol.report.z_prime});
      result.per_dimension.push_back({epsilon, approach, eval.per_dimension_mse});
    }
  }
  return result;
}

std::vector<TheoryTable> RunTheoryFigure(double r, const Vector& epsilon_grid) {
  std::vector<TheoryTable> tables;
  for (int setting = 0; setting < 3; ++setting) {
    const double tail = static_cast<double>(setting);
    TheoryTable table;
    table.name = "setting_" + std::to_string(setting + 1);
    table.eigenvalues = {4.0, tail, tail, tail};
    table.rows = TheoryCurves(table.eigenvalues, r, epsilon_grid, 2);
    tables.push_back(std::move(table));
  }
  return tables;
}

ExperimentResult RunGeneralExperiment(const Matrix& inputs,
                                      const Matrix& targets,
                                      const GeneralSpec& spec,
                                      const ExperimentConfig& config) {
  RequireGrid(config);
  if (inputs.rows() != targets.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "inputs and targets differ in sample count");
  }
  const std::size_t n = inputs.cols();
  if (config.z < 1) {
    throw Error(ErrorCode::kBadLatentDim, "latent dimension z must be >= 1");
  }
  const std::size_t z = static_cast<std::size_t>(config.z);
  const Matrix x = Normalize({inputs, {}}, config.mode).data.values;

  // Deterministic shuffle, then train / held-out split.
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle(DeriveSeed(config.seed, 1000));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle.Index(i)]);
  }
  const std::size_t train_count = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(order.size())));
  if (train_count < 2 || train_count + 2 > order.size()) {
    throw Error(ErrorCode::kTooFewSamples,
                "not enough samples for a train / held-out split");
  }
  const std::vector<std::size_t> train_rows(order.begin(), order.begin() + train_count);
  const std::vector<std::size_t> test_rows(order.begin() + train_count, order.end());
  const Matrix x_train = SelectRows(x, train_rows);
  const Matrix x_test = SelectRows(x, test_rows);
  const Matrix y_train = SelectRows(targets, train_rows);

  const std::size_t hidden =
      spec.task_hidden > 0 ? static_cast<std::size_t>(spec.task_hidden)
                           : static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(n)));
  Net task = Net::Random({n, hidden, targets.cols()},
                         {Activation::kRelu, spec.task_output},
                         DeriveSeed(config.seed, 2000));
  task = PretrainTask(x_train, y_train, std::move(task), spec.loss,
                      spec.task_epochs, spec.task_learning_rate)
             .net;

  ExperimentResult result;
  result.name = "general";
  result.seed = config.seed;
  result.config_hash = ConfigHash(config);
  result.data_fingerprint = DataFingerprint(inputs);
  for (std::size_t e = 0; e < config.epsilon_grid.size(); ++e) {
    const double epsilon = config.epsilon_grid[e];
    TrainConfig train = TrainConfig::FromExperiment(config, epsilon);
    train.seed = DeriveSeed(config.seed, 3000 + e);

    NetCodec seed_codec;
    seed_codec.encoder = LinearOrHidden(n, z, spec.codec_hidden, DeriveSeed(train.seed, 1));
    seed_codec.decoder = LinearOrHidden(z, n, spec.codec_hidden, DeriveSeed(train.seed, 2));
    seed_codec.task = task;
    seed_codec.loss = spec.loss;
    seed_codec.epsilon = epsilon;

    NetCodec agnostic_seed = seed_codec;
    agnostic_seed.encoder = Net::Identity(n);
    agnostic_seed.decoder = LinearOrHidden(n, n, spec.codec_hidden, DeriveSeed(train.seed, 3));

    const TrainResult runs[] = {
        TrainTaskAware(x_train, seed_codec, train),
        TrainTaskAgnostic(x_train, agnostic_seed, train),
        TrainPrivacyAgnostic(x_train, seed_codec, train)};
    const char* names[] = {"aware", "task-agnostic", "privacy-agnostic"};
    for (std::size_t a = 0; a < 3; ++a) {
      const NetCodec& codec = runs[a].codec;
      const Evaluation eval = Evaluate(codec, x_test, config.noise_draws,
                                       DeriveSeed(config.seed, 4000 + 3 * e + a));
      result.rows.push_back({epsilon, names[a], eval.mean_loss, eval.std_error,
                             codec.delta1, codec.sigma_w2(),
                             static_cast<int>(codec.latent_dims())});
    }
  }
  return result;
}

}  // namespace taldp
