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

// taldp: fit, apply and inspect task-aware LDP codecs from the command line.
//
// Exit status: 0 on success, 2 for invalid input, 3 for numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "taldp/data_io.h"
#include "taldp/error.h"
#include "taldp/linear_codec.h"
#include "taldp/linear_solver.h"
#include "taldp/mechanism.h"
#include "taldp/neural.h"
#include "taldp/rng.h"
#include "taldp/trainer.h"
#include "taldp/whitening.h"

namespace {

using taldp::Error;
using taldp::ErrorCode;
using taldp::FormatDouble;
using taldp::Matrix;

struct DataArgs {
  std::string path;
  bool header = false;
};

void AddDataOptions(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.path, "Input CSV, one sample per row")->required();
  cmd->add_flag("--header", args.header, "First CSV row holds column names");
}

void RequirePositiveEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
  }
}

bool IsLinearCodec(const std::string& text) {
  return text.rfind("taldp-linear-codec", 0) == 0;
}

Matrix MaybeNormalize(const std::optional<taldp::NormalizationSpec>& spec,
                      const Matrix& rows) {
  return spec ? taldp::ApplyNormalization(*spec, rows) : rows;
}

void RequireColumns(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": data has " + std::to_string(got) +
                    " columns, codec expects " + std::to_string(want));
  }
}

// ---- fit-linear -----------------------------------------------------------

struct FitLinearArgs {
  DataArgs data;
  std::string task_path;
  double epsilon = 0.0;
  std::string approach = "aware";
  int z = 0;
  std::string normalize = "none";
  std::string out;
  std::string report;
  int workers = 1;
};

int RunFitLinear(const FitLinearArgs& a) {
  RequirePositiveEpsilon(a.epsilon);
  const taldp::Approach approach = taldp::ParseApproach(a.approach);
  const taldp::DataMatrix data = taldp::LoadCsv(a.data.path, a.data.header);
  const Matrix task = taldp::LoadCsv(a.task_path, false).values;
  if (task.cols() != data.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "task-matrix: has " + std::to_string(task.cols()) +
                    " columns, data has " + std::to_string(data.dims()));
  }
  std::optional<taldp::NormalizationSpec> spec;
  Matrix x = data.values;
  if (a.normalize != "none") {
    taldp::NormalizedData nd =
        taldp::Normalize(data, taldp::ParseNormalizationMode(a.normalize));
    x = std::move(nd.data.values);
    spec = std::move(nd.spec);
  }
  const taldp::WhiteningModel model = taldp::FitWhitening(x);
  const Matrix h = taldp::WhitenRows(model, x);
  taldp::LinearSolution sol;
  switch (approach) {
    case taldp::Approach::kTaskAware:
      sol = taldp::SolveTaskAware(model, task, h, a.epsilon, a.workers);
      break;
    case taldp::Approach::kTaskAgnostic:
      sol = taldp::SolveTaskAgnostic(model, task, h, a.epsilon, a.workers);
      break;
    case taldp::Approach::kPrivacyAgnostic:
      if (a.z < 1) {
        throw Error(ErrorCode::kBadLatentDim,
                    "z: privacy-agnostic needs --z >= 1");
      }
      sol = taldp::SolvePrivacyAgnostic(model, task, h, a.epsilon, a.z, a.workers);
      break;
  }
  sol.codec.normalization = spec;
  const std::string report_path = a.report.empty() ? a.out + ".report" : a.report;
  taldp::WriteTextFile(a.out, taldp::SerializeCodec(sol.codec));
  taldp::WriteTextFile(report_path,
                       "approach = " + std::string(taldp::ApproachName(approach)) +
                           "\n" + taldp::FormatSolveReport(sol.report));
  std::cout << "fit-linear approach=" << taldp::ApproachName(approach)
            << " z=" << sol.report.z_prime
            << " delta1=" << FormatDouble(sol.report.delta1)
            << " sigma_w2=" << FormatDouble(sol.report.sigma_w2)
            << " predicted_loss=" << FormatDouble(sol.report.predicted_loss)
            << " lower=" << FormatDouble(sol.report.lower_bound)
            << " upper=" << FormatDouble(sol.report.upper_bound) << "\n";
  return 0;
}

// ---- fit-general ----------------------------------------------------------

struct FitGeneralArgs {
  DataArgs data;
  std::string targets;
  std::string config;
  std::optional<double> epsilon;
  std::string approach = "aware";
  std::string loss = "squared_l2";
  int hidden = 0;
  int task_epochs = 2000;
  double task_lr = 1e-2;
  std::string out;
  std::string trace;
  std::uint64_t seed = 0;
};

int RunFitGeneral(const FitGeneralArgs& a) {
  taldp::ExperimentConfig config = taldp::LoadConfig(a.config);
  config.seed = a.seed;
  const double epsilon = a.epsilon.value_or(config.epsilon_grid.front());
  RequirePositiveEpsilon(epsilon);
  const taldp::Approach approach = taldp::ParseApproach(a.approach);
  const taldp::LossKind loss = taldp::ParseLossKind(a.loss);
  const taldp::DataMatrix data = taldp::LoadCsv(a.data.path, a.data.header);
  const Matrix targets = taldp::LoadCsv(a.targets, false).values;
  if (targets.rows() != data.samples()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "targets: has " + std::to_string(targets.rows()) +
                    " rows, data has " + std::to_string(data.samples()));
  }
  taldp::NormalizedData nd = taldp::Normalize(data, config.mode);
  const Matrix& x = nd.data.values;
  const std::size_t n = x.cols();
  const std::size_t z = static_cast<std::size_t>(config.z);
  if (config.z < 1) throw Error(ErrorCode::kBadLatentDim, "z must be >= 1");

  const std::size_t hidden =
      static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(n)));
  const taldp::Activation head = loss == taldp::LossKind::kBinaryCrossEntropy
                                     ? taldp::Activation::kLogistic
                                     : taldp::Activation::kIdentity;
  taldp::Net task = taldp::Net::Random({n, hidden, targets.cols()},
                                       {taldp::Activation::kRelu, head},
                                       taldp::DeriveSeed(a.seed, 1));
  task = taldp::PretrainTask(x, targets, std::move(task), loss, a.task_epochs,
                             a.task_lr)
             .net;

  auto make_net = [&](std::size_t in, std::size_t out, std::uint64_t stream) {
    if (a.hidden <= 0) {
      return taldp::Net::Random({in, out}, {taldp::Activation::kIdentity},
                                taldp::DeriveSeed(a.seed, stream));
    }
    return taldp::Net::Random({in, static_cast<std::size_t>(a.hidden), out},
                              {taldp::Activation::kRelu, taldp::Activation::kIdentity},
                              taldp::DeriveSeed(a.seed, stream));
  };
  taldp::NetCodec seed;
  seed.task = task;
  seed.loss = loss;
  seed.epsilon = epsilon;
  taldp::TrainConfig train = taldp::TrainConfig::FromExperiment(config, epsilon);
  train.seed = taldp::DeriveSeed(a.seed, 4);
  taldp::TrainResult result;
  switch (approach) {
    case taldp::Approach::kTaskAware:
      seed.encoder = make_net(n, z, 2);
      seed.decoder = make_net(z, n, 3);
      result = taldp::TrainTaskAware(x, std::move(seed), train);
      break;
    case taldp::Approach::kTaskAgnostic:
      seed.encoder = taldp::Net::Identity(n);
      seed.decoder = make_net(n, n, 3);
      result = taldp::TrainTaskAgnostic(x, std::move(seed), train);
      break;
    case taldp::Approach::kPrivacyAgnostic:
      seed.encoder = make_net(n, z, 2);
      seed.decoder = make_net(z, n, 3);
      result = taldp::TrainPrivacyAgnostic(x, std::move(seed), train);
      break;
  }
  taldp::StoredNetCodec stored{result.codec, nd.spec};
  taldp::WriteTextFile(a.out, taldp::SerializeNetCodec(stored));
  if (!a.trace.empty()) taldp::WriteTextFile(a.trace, result.trace.ToCsv());
  const double final_loss =
      result.trace.records.empty() ? 0.0 : result.trace.records.back().loss;
  std::cout << "fit-general approach=" << taldp::ApproachName(approach)
            << " z=" << result.codec.latent_dims()
            << " epochs=" << result.trace.records.size()
            << " delta1=" << FormatDouble(result.codec.delta1)
            << " sigma_w2=" << FormatDouble(result.codec.sigma_w2())
            << " final_loss=" << FormatDouble(final_loss) << "\n";
  return 0;
}

// ---- anonymize ------------------------------------------------------------

struct CodecDataArgs {
  std::string codec;
  DataArgs data;
  std::uint64_t seed = 0;
  std::string out;
  int draws = 100;
};

int RunAnonymize(const CodecDataArgs& a) {
  const std::string text = taldp::ReadTextFile(a.codec);
  const taldp::DataMatrix data = taldp::LoadCsv(a.data.path, a.data.header);
  Matrix released;
  if (IsLinearCodec(text)) {
    const taldp::LinearCodec codec = taldp::DeserializeCodec(text);
    released = codec.Anonymize(data.values, a.seed);
  } else {
    const taldp::StoredNetCodec stored = taldp::DeserializeNetCodec(text);
    const taldp::NetCodec& codec = stored.codec;
    RequireColumns(data.dims(), codec.encoder.input_dims(), "data");
    Matrix phi = codec.encoder.Forward(MaybeNormalize(stored.normalization, data.values));
    const Matrix noise = taldp::LaplaceMechanism(codec.scale(), codec.latent_dims(), a.seed)
                             .SampleMatrix(phi.rows());
    for (std::size_t i = 0; i < phi.entries().size(); ++i) {
      phi.entries()[i] += noise.entries()[i];
    }
    released = codec.decoder.Forward(phi);
    if (stored.normalization) {
      released = taldp::Denormalize(*stored.normalization, released);
    }
  }
  taldp::WriteTextFile(a.out, taldp::FormatCsv(released, data.names));
  std::cout << "anonymize rows=" << released.rows() << " cols=" << released.cols()
            << " seed=" << a.seed << " out=" << a.out << "\n";
  return 0;
}

// ---- evaluate -------------------------------------------------------------

int RunEvaluate(const CodecDataArgs& a) {
  const std::string text = taldp::ReadTextFile(a.codec);
  const taldp::DataMatrix data = taldp::LoadCsv(a.data.path, a.data.header);
  double mean = 0.0;
  double se = 0.0;
  std::string extra;
  if (IsLinearCodec(text)) {
    const taldp::LinearCodec codec = taldp::DeserializeCodec(text);
    const taldp::LinearEvaluation eval =
        taldp::EvaluateLinearCodec(codec, data.values, a.draws, a.seed);
    mean = eval.mean_loss;
    se = eval.std_error;
    extra = "per_dimension_mse =";
    for (std::size_t i = 0; i < eval.per_dimension_mse.size(); ++i) {
      extra += (i == 0 ? " " : ",") + FormatDouble(eval.per_dimension_mse[i]);
    }
    extra += "\n";
  } else {
    const taldp::StoredNetCodec stored = taldp::DeserializeNetCodec(text);
    RequireColumns(data.dims(), stored.codec.encoder.input_dims(), "data");
    const taldp::Evaluation eval = taldp::Evaluate(
        stored.codec, MaybeNormalize(stored.normalization, data.values), a.draws,
        a.seed);
    mean = eval.mean_loss;
    se = eval.std_error;
  }
  taldp::WriteTextFile(a.out, "mean_loss = " + FormatDouble(mean) +
                                  "\nstd_error = " + FormatDouble(se) +
                                  "\ndraws = " + std::to_string(a.draws) +
                                  "\nsamples = " + std::to_string(data.samples()) +
                                  "\nseed = " + std::to_string(a.seed) + "\n" + extra);
  std::cout << "evaluate mean_loss=" << FormatDouble(mean)
            << " std_error=" << FormatDouble(se) << " draws=" << a.draws << "\n";
  return 0;
}

// ---- theory ---------------------------------------------------------------

struct TheoryArgs {
  std::string lambda;
  double r = 1.0;
  std::optional<double> r_min;
  std::string grid;
  int z_pa = 2;
  std::string out;
};

int RunTheory(const TheoryArgs& a) {
  const std::vector<double> lambda = taldp::ParseRealList(a.lambda, "lambda");
  const std::vector<double> grid = taldp::ParseRealList(a.grid, "epsilon-grid");
  const auto rows = taldp::TheoryCurves(lambda, a.r, grid, a.z_pa, a.r_min);
  taldp::WriteTextFile(a.out, taldp::FormatCurves(rows));
  std::cout << "theory rows=" << rows.size() << " n=" << lambda.size()
            << " z_pa=" << a.z_pa << " out=" << a.out << "\n";
  return 0;
}

// ---- sensitivity ----------------------------------------------------------

struct SensitivityArgs {
  DataArgs data;
  std::string codec;
  double epsilon = 0.0;
  int workers = 1;
  std::string out;
};

int RunSensitivity(const SensitivityArgs& a) {
  RequirePositiveEpsilon(a.epsilon);
  const taldp::DataMatrix data = taldp::LoadCsv(a.data.path, a.data.header);
  Matrix encoded = data.values;
  if (!a.codec.empty()) {
    const std::string text = taldp::ReadTextFile(a.codec);
    if (IsLinearCodec(text)) {
      encoded = taldp::DeserializeCodec(text).Encode(data.values);
    } else {
      const taldp::StoredNetCodec stored = taldp::DeserializeNetCodec(text);
      RequireColumns(data.dims(), stored.codec.encoder.input_dims(), "data");
      encoded = stored.codec.encoder.Forward(
          MaybeNormalize(stored.normalization, data.values));
    }
  }
  const taldp::SensitivityReport sens = taldp::SensitivityExact(encoded, a.workers);
  const taldp::LaplaceMechanism mech =
      taldp::Calibrate(sens.delta1, a.epsilon, encoded.cols());
  taldp::WriteTextFile(a.out, taldp::FormatMechanismReport(sens, mech, a.epsilon));
  std::cout << "sensitivity delta1=" << FormatDouble(sens.delta1)
            << " pair=" << sens.arg_i << "," << sens.arg_j
            << " b=" << FormatDouble(mech.scale())
            << " sigma_w2=" << FormatDouble(mech.sigma_w2()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-aware local differential privacy codecs"};
  app.require_subcommand(1);

  FitLinearArgs fit_linear;
  auto* fl = app.add_subcommand("fit-linear", "Closed-form linear codec");
  AddDataOptions(fl, fit_linear.data);
  fl->add_option("--task-matrix", fit_linear.task_path, "Task matrix K as CSV")->required();
  fl->add_option("--epsilon", fit_linear.epsilon, "Privacy budget")->required();
  fl->add_option("--approach", fit_linear.approach,
                 "aware, task-agnostic or privacy-agnostic");
  fl->add_option("--z", fit_linear.z, "Latent width for privacy-agnostic");
  fl->add_option("--normalize", fit_linear.normalize,
                 "none, per-dimension or joint");
  fl->add_option("--out", fit_linear.out, "Codec output path")->required();
  fl->add_option("--report", fit_linear.report, "Report path (default <out>.report)");
  fl->add_option("--workers", fit_linear.workers, "Sensitivity scan threads");

  FitGeneralArgs fit_general;
  auto* fg = app.add_subcommand("fit-general", "Train a neural codec");
  AddDataOptions(fg, fit_general.data);
  fg->add_option("--targets", fit_general.targets, "Task targets CSV")->required();
  fg->add_option("--config", fit_general.config, "Experiment config")->required();
  fg->add_option("--epsilon", fit_general.epsilon,
                 "Privacy budget (default: first grid value)");
  fg->add_option("--approach", fit_general.approach,
                 "aware, task-agnostic or privacy-agnostic");
  fg->add_option("--loss", fit_general.loss, "squared_l2 or bce");
  fg->add_option("--hidden", fit_general.hidden, "Codec hidden width, 0 = linear");
  fg->add_option("--task-epochs", fit_general.task_epochs, "Task pretraining epochs");
  fg->add_option("--task-lr", fit_general.task_lr, "Task pretraining learning rate");
  fg->add_option("--out", fit_general.out, "Codec output path")->required();
  fg->add_option("--trace", fit_general.trace, "Training trace CSV");
  fg->add_option("--seed", fit_general.seed, "RNG seed");

  CodecDataArgs anonymize;
  auto* an = app.add_subcommand("anonymize", "Release noisy reconstructions");
  an->add_option("--codec", anonymize.codec, "Codec file")->required();
  AddDataOptions(an, anonymize.data);
  an->add_option("--seed", anonymize.seed, "RNG seed");
  an->add_option("--out", anonymize.out, "Output CSV")->required();

  CodecDataArgs evaluate;
  auto* ev = app.add_subcommand("evaluate", "Monte-Carlo task loss of a codec");
  ev->add_option("--codec", evaluate.codec, "Codec file")->required();
  AddDataOptions(ev, evaluate.data);
  ev->add_option("--draws", evaluate.draws, "Noise draws per sample");
  ev->add_option("--seed", evaluate.seed, "RNG seed");
  ev->add_option("--out", evaluate.out, "Report path")->required();

  TheoryArgs theory;
  auto* th = app.add_subcommand("theory", "Closed-form loss curves on a sphere");
  th->add_option("--lambda", theory.lambda, "Comma-separated eigenvalues")->required();
  th->add_option("--r", theory.r, "Sphere radius")->required();
  th->add_option("--r-min", theory.r_min, "Inner radius for the lower bound");
  th->add_option("--epsilon-grid", theory.grid, "Comma-separated budgets")->required();
  th->add_option("--z-pa", theory.z_pa, "Privacy-agnostic latent width");
  th->add_option("--out", theory.out, "Curve CSV")->required();
  std::uint64_t unused_seed = 0;
  th->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  SensitivityArgs sensitivity;
  auto* se = app.add_subcommand("sensitivity", "Exact l1 sensitivity report");
  AddDataOptions(se, sensitivity.data);
  se->add_option("--codec", sensitivity.codec, "Codec whose encoder is applied");
  se->add_option("--epsilon", sensitivity.epsilon, "Privacy budget")->required();
  se->add_option("--workers", sensitivity.workers, "Scan threads");
  se->add_option("--out", sensitivity.out, "Report path")->required();
  se->add_option("--seed", unused_seed, "Accepted for uniformity; unused");
  fl->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fl) return RunFitLinear(fit_linear);
    if (*fg) return RunFitGeneral(fit_general);
    if (*an) return RunAnonymize(anonymize);
    if (*ev) return RunEvaluate(evaluate);
    if (*th) return RunTheory(theory);
    if (*se) return RunSensitivity(sensitivity);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return taldp::IsNumericalFailure(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
