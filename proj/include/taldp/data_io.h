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

#ifndef TALDP_DATA_IO_H_
#define TALDP_DATA_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taldp/matrix.h"

namespace taldp {

// N x n sample table; one sample per row.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> names;  // empty when the source had no header

  std::size_t samples() const { return values.rows(); }
  std::size_t dims() const { return values.cols(); }
};

// Comma-separated, '.' decimal point, optional single header row.
DataMatrix ParseCsv(std::string_view text, bool has_header);
DataMatrix LoadCsv(const std::string& path, bool has_header);

// Rows are written with 17 significant digits so values round-trip exactly.
std::string FormatCsv(const Matrix& values,
                      const std::vector<std::string>& names = {});
void WriteTextFile(const std::string& path, std::string_view contents);
std::string ReadTextFile(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double x);

enum class NormalizationMode { kPerDimension, kJoint };

std::string_view NormalizationModeName(NormalizationMode mode);
NormalizationMode ParseNormalizationMode(std::string_view text);

// x_normalized = (x - shift) / scale, column by column. Under joint mode all
// columns share one shift and one scale.
struct NormalizationSpec {
  NormalizationMode mode = NormalizationMode::kPerDimension;
  Vector shift;
  Vector scale;
};

struct NormalizedData {
  DataMatrix data;
  NormalizationSpec spec;
};

// Mean / standard-deviation standardization (population std).
NormalizedData Normalize(const DataMatrix& data, NormalizationMode mode);
Matrix ApplyNormalization(const NormalizationSpec& spec, const Matrix& values);
Matrix Denormalize(const NormalizationSpec& spec, const Matrix& values);

struct ExperimentConfig {
  std::vector<double> epsilon_grid;
  int z = 0;
  double eta = 0.0;
  int epochs = 300;
  int inner_steps = 15;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  int noise_draws = 100;
  NormalizationMode mode = NormalizationMode::kPerDimension;
};

// One "key = value" pair per line; '#' starts a comment. epsilon_grid, z and
// eta are required; unknown or repeated keys are errors.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::string& path);

// Canonical text form; ParseConfig(FormatConfig(c)) reproduces c.
std::string FormatConfig(const ExperimentConfig& config);

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);
std::string HexDigest(std::uint64_t value);

// Parses a comma-separated list of reals; throws kParseError naming `field`.
std::vector<double> ParseRealList(std::string_view text, std::string_view field);

}  // namespace taldp

#endif  // TALDP_DATA_IO_H_
