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

#include "taldp/linear_codec.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "taldp/error.h"
#include "taldp/mechanism.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

constexpr std::string_view kMagic = "taldp-linear-codec v1";

std::string Join(std::span<const double> values) {
  std::string out;
  for (double v : values) {
    out += ' ';
    out += FormatDouble(v);
  }
  return out;
}

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kParseError, "codec file: " + what);
}

// Reads "key v1 v2 ..." lines in a fixed order.
class LineReader {
 public:
  explicit LineReader(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) lines_.emplace_back(line);
      start = end + 1;
    }
  }

  std::string_view Next() {
    if (index_ >= lines_.size()) Malformed("unexpected end of file");
    return lines_[index_++];
  }

  // Tokens following `key` on the next line.
  std::vector<std::string_view> Field(std::string_view key) {
    std::string_view line = Next();
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      std::size_t end = line.find(' ', pos);
      if (end == std::string_view::npos) end = line.size();
      if (end > pos) tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.empty() || tokens[0] != key) {
      Malformed("expected field '" + std::string(key) + "'");
    }
    tokens.erase(tokens.begin());
    return tokens;
  }

  Vector Reals(std::string_view key, std::size_t count) {
    const auto tokens = Field(key);
    if (tokens.size() != count) {
      Malformed("field '" + std::string(key) + "' needs " +
                std::to_string(count) + " values, found " +
                std::to_string(tokens.size()));
    }
    Vector out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = ParseReal(tokens[i], key);
    return out;
  }

  double Real(std::string_view key) { return Reals(key, 1)[0]; }

  std::size_t Count(std::string_view key) {
    const auto tokens = Field(key);
    std::size_t value = 0;
    if (tokens.size() != 1) Malformed("field '" + std::string(key) + "'");
    const auto* begin = tokens[0].data();
    const auto* end = begin + tokens[0].size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      Malformed("field '" + std::string(key) + "' is not a count");
    }
    return value;
  }

  std::string_view Word(std::string_view key) {
    const auto tokens = Field(key);
    if (tokens.size() != 1) Malformed("field '" + std::string(key) + "'");
    return tokens[0];
  }

 private:
  static double ParseReal(std::string_view token, std::string_view key) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      Malformed("field '" + std::string(key) + "' has a malformed number");
    }
    return value;
  }

  std::vector<std::string_view> lines_;
  std::size_t index_ = 0;
};

void RequireInputColumns(const LinearCodec& codec, std::size_t cols) {
  if (cols != codec.input_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data has " + std::to_string(cols) + " columns, codec expects " +
                    std::to_string(codec.input_dims()));
  }
}

}  // namespace

std::string_view ApproachName(Approach approach) {
  switch (approach) {
    case Approach::kTaskAware: return "aware";
    case Approach::kTaskAgnostic: return "task-agnostic";
    case Approach::kPrivacyAgnostic: return "privacy-agnostic";
  }
  return "unknown";
}

Approach ParseApproach(std::string_view text) {
  if (text == "aware" || text == "task-aware") return Approach::kTaskAware;
  if (text == "task-agnostic") return Approach::kTaskAgnostic;
  if (text == "privacy-agnostic") return Approach::kPrivacyAgnostic;
  throw Error(ErrorCode::kInvalidArgument,
              "approach must be aware, task-agnostic or privacy-agnostic, got '" +
                  std::string(text) + "'");
}

Matrix LinearCodec::Encode(const Matrix& rows) const {
  RequireInputColumns(*this, rows.cols());
  const Matrix h = WhitenRows(
      whitening, normalization ? ApplyNormalization(*normalization, rows) : rows);
  return MultiplyTransposeB(h, encoder);
}

Matrix LinearCodec::Decode(const Matrix& latents) const {
  if (latents.cols() != latent_dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "latents have " + std::to_string(latents.cols()) +
                    " columns, codec expects " + std::to_string(latent_dims()));
  }
  const Matrix x = UnwhitenRows(whitening, MultiplyTransposeB(latents, decoder));
  return normalization ? Denormalize(*normalization, x) : x;
}

Matrix LinearCodec::Anonymize(const Matrix& rows, std::uint64_t seed) const {
  Matrix phi = Encode(rows);
  const LaplaceMechanism mech(scale, latent_dims(), seed);
  const Matrix noise = mech.SampleMatrix(phi.rows());
  for (std::size_t i = 0; i < phi.entries().size(); ++i) {
    phi.entries()[i] += noise.entries()[i];
  }
  return Decode(phi);
}

LinearEvaluation EvaluateLinearCodec(const LinearCodec& codec,
                                     const Matrix& rows, int draws,
                                     std::uint64_t seed) {
  RequireInputColumns(codec, rows.cols());
  if (draws < 1) {
    throw Error(ErrorCode::kInvalidArgument, "noise draws must be at least 1");
  }
  if (rows.rows() == 0) throw Error(ErrorCode::kEmptyData, "no samples to evaluate");
  const std::size_t count = rows.rows();
  const std::size_t n = codec.input_dims();
  const std::size_t z = codec.latent_dims();
  const Matrix h = WhitenRows(codec.whitening, codec.normalization
                                                   ? ApplyNormalization(*codec.normalization, rows)
                                                   : rows);
  const Matrix latents = MultiplyTransposeB(h, codec.encoder);
  std::vector<Rng> streams;
  streams.reserve(count);
  for (std::size_t i = 0; i < count; ++i) streams.emplace_back(DeriveSeed(seed, i));

  Vector mean(count, 0.0);
  Vector m2(count, 0.0);
  LinearEvaluation out;
  out.per_dimension_mse.assign(n, 0.0);
  Matrix noisy(count, z);
  for (int d = 0; d < draws; ++d) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t c = 0; c < z; ++c) {
        noisy(i, c) = latents(i, c) + streams[i].Laplace(codec.scale);
      }
    }
    Matrix err_h = MultiplyTransposeB(noisy, codec.decoder);
    for (std::size_t i = 0; i < err_h.entries().size(); ++i) {
      err_h.entries()[i] -= h.entries()[i];
    }
    const Matrix err_x = MultiplyTransposeB(err_h, codec.whitening.factor);
    const Matrix err_task = MultiplyTransposeB(err_x, codec.task_matrix);
    for (std::size_t i = 0; i < count; ++i) {
      const double loss = Dot(err_task.row(i), err_task.row(i));
      const double delta = loss - mean[i];
      mean[i] += delta / static_cast<double>(d + 1);
      m2[i] += delta * (loss - mean[i]);
      const auto e = err_x.row(i);
      for (std::size_t c = 0; c < n; ++c) out.per_dimension_mse[c] += e[c] * e[c];
    }
  }
  const double k = static_cast<double>(draws);
  double total = 0.0;
  double variance_sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    total += mean[i];
    if (draws > 1) variance_sum += m2[i] / (k - 1.0);
  }
  out.mean_loss = total / static_cast<double>(count);
  out.std_error = std::sqrt(variance_sum / k) / static_cast<double>(count);
  for (double& v : out.per_dimension_mse) v /= k * static_cast<double>(count);
  return out;
}

std::string SerializeCodec(const LinearCodec& codec) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "approach " << ApproachName(codec.approach) << "\n";
  out << "input_dims " << codec.input_dims() << "\n";
  out << "latent_dims " << codec.latent_dims() << "\n";
  out << "task_rows " << codec.task_matrix.rows() << "\n";
  out << "epsilon " << FormatDouble(codec.epsilon) << "\n";
  out << "delta1 " << FormatDouble(codec.delta1) << "\n";
  out << "scale " << FormatDouble(codec.scale) << "\n";
  out << "sigma_w2 " << FormatDouble(codec.sigma_w2) << "\n";
  out << "jitter " << FormatDouble(codec.whitening.jitter) << "\n";
  out << "mean" << Join(codec.whitening.mean) << "\n";
  out << "factor" << Join(codec.whitening.factor.entries()) << "\n";
  out << "task" << Join(codec.task_matrix.entries()) << "\n";
  out << "encoder" << Join(codec.encoder.entries()) << "\n";
  out << "decoder" << Join(codec.decoder.entries()) << "\n";
  if (codec.normalization) {
    out << "normalization " << NormalizationModeName(codec.normalization->mode)
        << "\n";
    out << "shift" << Join(codec.normalization->shift) << "\n";
    out << "norm_scale" << Join(codec.normalization->scale) << "\n";
  } else {
    out << "normalization none\n";
  }
  out << "end\n";
  return out.str();
}

LinearCodec DeserializeCodec(std::string_view text) {
  LineReader reader(text);
  if (reader.Next() != kMagic) Malformed("missing or unsupported version header");
  LinearCodec codec;
  codec.approach = ParseApproach(reader.Word("approach"));
  const std::size_t n = reader.Count("input_dims");
  const std::size_t z = reader.Count("latent_dims");
  const std::size_t m = reader.Count("task_rows");
  if (n == 0 || z == 0) Malformed("dimensions must be positive");
  codec.epsilon = reader.Real("epsilon");
  codec.delta1 = reader.Real("delta1");
  codec.scale = reader.Real("scale");
  codec.sigma_w2 = reader.Real("sigma_w2");
  codec.whitening.jitter = reader.Real("jitter");
  codec.whitening.mean = reader.Reals("mean", n);
  codec.whitening.factor = Matrix(n, n, reader.Reals("factor", n * n));
  codec.task_matrix = Matrix(m, n, reader.Reals("task", m * n));
  codec.encoder = Matrix(z, n, reader.Reals("encoder", z * n));
  codec.decoder = Matrix(n, z, reader.Reals("decoder", n * z));
  const std::string_view mode = reader.Word("normalization");
  if (mode != "none") {
    NormalizationSpec spec;
    spec.mode = ParseNormalizationMode(mode);
    spec.shift = reader.Reals("shift", n);
    spec.scale = reader.Reals("norm_scale", n);
    codec.normalization = std::move(spec);
  }
  if (reader.Next() != "end") Malformed("missing end marker");
  if (!(codec.scale >= 0.0)) Malformed("scale must be non-negative");
  return codec;
}

}  // namespace taldp
