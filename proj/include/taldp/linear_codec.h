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

#ifndef TALDP_LINEAR_CODEC_H_
#define TALDP_LINEAR_CODEC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "taldp/data_io.h"
#include "taldp/matrix.h"
#include "taldp/whitening.h"

namespace taldp {

enum class Approach { kTaskAware, kTaskAgnostic, kPrivacyAgnostic };

// "aware", "task-agnostic", "privacy-agnostic".
std::string_view ApproachName(Approach approach);
Approach ParseApproach(std::string_view text);

// Deployable linear anonymizer. In x coordinates the released value is
// phi = E L^{-1}(x - mean) + w and the reconstruction is
// x_hat = mean + L D phi, with w ~ Laplace(0, scale) per coordinate.
struct LinearCodec {
  Approach approach = Approach::kTaskAware;
  Matrix encoder;  // E, Z x n
  Matrix decoder;  // D, n x Z
  double epsilon = 0.0;
  double delta1 = 0.0;
  double scale = 0.0;     // Laplace b = delta1 / epsilon
  double sigma_w2 = 0.0;  // 2 b^2
  WhiteningModel whitening;
  Matrix task_matrix;  // K, m x n
  // Applied to raw rows before whitening and undone after decoding.
  std::optional<NormalizationSpec> normalization;

  std::size_t input_dims() const { return whitening.dims(); }
  std::size_t latent_dims() const { return encoder.rows(); }

  // Rows in, rows out. Inputs are in the raw (pre-normalization) units.
  Matrix Encode(const Matrix& rows) const;
  Matrix Decode(const Matrix& latents) const;
  // Encode, add seeded Laplace noise, decode.
  Matrix Anonymize(const Matrix& rows, std::uint64_t seed) const;
};

struct LinearEvaluation {
  double mean_loss = 0.0;  // mean of |K (x_hat - x)|^2
  double std_error = 0.0;  // noise-only standard error
  Vector per_dimension_mse;  // mean of (x_hat - x)_d^2
};

// Monte-Carlo loss of the deployed codec. Rows are in the codec's input
// units; errors are measured after normalization. Sample i draws its noise
// from the stream DeriveSeed(seed, i).
LinearEvaluation EvaluateLinearCodec(const LinearCodec& codec,
                                     const Matrix& rows, int draws,
                                     std::uint64_t seed);

// Versioned text format; every real is written with 17 significant digits.
std::string SerializeCodec(const LinearCodec& codec);
LinearCodec DeserializeCodec(std::string_view text);

}  // namespace taldp

#endif  // TALDP_LINEAR_CODEC_H_
