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

#include "taldp/data_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "taldp/error.h"

namespace taldp {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> ParseReal(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> ParseInteger(std::string_view text) {
  text = Trim(text);
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

DataMatrix ParseCsv(std::string_view text, bool has_header) {
  // Strip a UTF-8 byte-order mark.
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  DataMatrix out;
  std::vector<double> entries;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool header_pending = has_header;
  std::size_t line_number = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCommas(line);
    if (header_pending) {
      for (auto cell : cells) out.names.emplace_back(cell);
      cols = cells.size();
      header_pending = false;
      continue;
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw Error(ErrorCode::kRaggedRows,
                  "line " + std::to_string(line_number) + " has " +
                      std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(cols));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = ParseReal(cells[c]);
      if (!value) {
        throw Error(ErrorCode::kParseError,
                    "parse error at row " + std::to_string(line_number) +
                        ", column " + std::to_string(c + 1) + ": '" +
                        std::string(cells[c]) + "' is not a finite number");
      }
      entries.push_back(*value);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::kEmptyData, "csv has no data rows");
  out.values = Matrix(rows, cols, std::move(entries));
  return out;
}

DataMatrix LoadCsv(const std::string& path, bool has_header) {
  return ParseCsv(ReadTextFile(path), has_header);
}

std::string FormatDouble(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string FormatCsv(const Matrix& values,
                      const std::vector<std::string>& names) {
  std::string out;
  if (!names.empty()) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out += ',';
      out += names[c];
    }
    out += '\n';
  }
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += FormatDouble(values(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

std::string_view NormalizationModeName(NormalizationMode mode) {
  return mode == NormalizationMode::kJoint ? "joint" : "per-dimension";
}

NormalizationMode ParseNormalizationMode(std::string_view text) {
  text = Trim(text);
  if (text == "per-dimension") return NormalizationMode::kPerDimension;
  if (text == "joint") return NormalizationMode::kJoint;
  throw Error(ErrorCode::kParseError,
              "mode must be 'per-dimension' or 'joint', got '" +
                  std::string(text) + "'");
}

NormalizedData Normalize(const DataMatrix& data, NormalizationMode mode) {
  const Matrix& x = data.values;
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  if (rows < 2 || cols == 0) {
    throw Error(ErrorCode::kTooFewSamples, "normalize needs at least 2 samples");
  }
  NormalizationSpec spec{mode, Vector(cols), Vector(cols)};
  if (mode == NormalizationMode::kPerDimension) {
    for (std::size_t c = 0; c < cols; ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < rows; ++r) mean += x(r, c);
      mean /= static_cast<double>(rows);
      double var = 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        var += (x(r, c) - mean) * (x(r, c) - mean);
      }
      const double sd = std::sqrt(var / static_cast<double>(rows));
      if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
        throw Error(ErrorCode::kConstantColumn,
                    "column " + std::to_string(c + 1) + " is constant");
      }
      spec.shift[c] = mean;
      spec.scale[c] = sd;
    }
  } else {
    const double count = static_cast<double>(rows * cols);
    double mean = 0.0;
    for (double v : x.entries()) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : x.entries()) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / count);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw Error(ErrorCode::kConstantColumn, "data are constant");
    }
    std::fill(spec.shift.begin(), spec.shift.end(), mean);
    std::fill(spec.scale.begin(), spec.scale.end(), sd);
  }
  return {DataMatrix{ApplyNormalization(spec, x), data.names}, spec};
}

Matrix ApplyNormalization(const NormalizationSpec& spec, const Matrix& values) {
  if (values.cols() != spec.shift.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "normalization expects " + std::to_string(spec.shift.size()) +
                    " columns, data has " + std::to_string(values.cols()));
  }
  Matrix out = values;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = (out(r, c) - spec.shift[c]) / spec.scale[c];
    }
  }
  return out;
}

Matrix Denormalize(const NormalizationSpec& spec, const Matrix& values) {
  if (values.cols() != spec.shift.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "denormalization expects " + std::to_string(spec.shift.size()) +
                    " columns, data has " + std::to_string(values.cols()));
  }
  Matrix out = values;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = out(r, c) * spec.scale[c] + spec.shift[c];
    }
  }
  return out;
}

std::vector<double> ParseRealList(std::string_view text, std::string_view field) {
  std::vector<double> values;
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kParseError, std::string(field) + " is empty");
  }
  for (auto cell : SplitCommas(text)) {
    const auto value = ParseReal(cell);
    if (!value) {
      throw Error(ErrorCode::kParseError,
                  std::string(field) + ": '" + std::string(cell) +
                      "' is not a finite number");
    }
    values.push_back(*value);
  }
  return values;
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, std::string, std::less<>> seen;
  std::size_t line_number = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "config line " + std::to_string(line_number) +
                      ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (!seen.emplace(key, value).second) {
      throw Error(ErrorCode::kParseError, "config key '" + key + "' repeated");
    }
  }

  auto require_int = [&](const std::string& key, long long min) {
    const auto v = ParseInteger(seen.at(key));
    if (!v || *v < min) {
      throw Error(ErrorCode::kParseError,
                  key + " must be an integer >= " + std::to_string(min));
    }
    return *v;
  };
  auto require_real = [&](const std::string& key) {
    const auto v = ParseReal(seen.at(key));
    if (!v) throw Error(ErrorCode::kParseError, key + " must be a finite number");
    return *v;
  };

  for (const char* required : {"epsilon_grid", "z", "eta"}) {
    if (!seen.contains(required)) {
      throw Error(ErrorCode::kParseError,
                  std::string("config is missing required key '") + required + "'");
    }
  }
  for (const auto& [key, value] : seen) {
    if (key == "epsilon_grid") {
      config.epsilon_grid = ParseRealList(value, "epsilon_grid");
      for (double e : config.epsilon_grid) {
        if (!(e > 0.0)) {
          throw Error(ErrorCode::kNonPositiveEpsilon,
                      "epsilon_grid: epsilon must be positive");
        }
      }
    } else if (key == "z") {
      config.z = static_cast<int>(require_int(key, 1));
    } else if (key == "eta") {
      config.eta = require_real(key);
      if (config.eta < 0.0) {
        throw Error(ErrorCode::kParseError, "eta must be non-negative");
      }
    } else if (key == "epochs") {
      config.epochs = static_cast<int>(require_int(key, 1));
    } else if (key == "inner_steps") {
      config.inner_steps = static_cast<int>(require_int(key, 1));
    } else if (key == "lr") {
      config.lr = require_real(key);
      if (!(config.lr > 0.0)) {
        throw Error(ErrorCode::kParseError, "lr must be positive");
      }
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(require_int(key, 0));
    } else if (key == "noise_draws") {
      config.noise_draws = static_cast<int>(require_int(key, 1));
    } else if (key == "mode") {
      config.mode = ParseNormalizationMode(value);
    } else {
      throw Error(ErrorCode::kParseError, "unknown config key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadTextFile(path));
}

std::string FormatConfig(const ExperimentConfig& config) {
  std::string grid;
  for (std::size_t i = 0; i < config.epsilon_grid.size(); ++i) {
    if (i) grid += ',';
    grid += FormatDouble(config.epsilon_grid[i]);
  }
  std::string out;
  out += "epsilon_grid = " + grid + "\n";
  out += "z = " + std::to_string(config.z) + "\n";
  out += "eta = " + FormatDouble(config.eta) + "\n";
  out += "epochs = " + std::to_string(config.epochs) + "\n";
  out += "inner_steps = " + std::to_string(config.inner_steps) + "\n";
  out += "lr = " + FormatDouble(config.lr) + "\n";
  out += "seed = " + std::to_string(config.seed) + "\n";
  out += "noise_draws = " + std::to_string(config.noise_draws) + "\n";
  out += "mode = " + std::string(NormalizationModeName(config.mode)) + "\n";
  return out;
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string HexDigest(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace taldp
