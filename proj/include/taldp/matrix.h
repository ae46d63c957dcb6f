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

#ifndef TALDP_MATRIX_H_
#define TALDP_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace taldp {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);
  static Matrix Diagonal(std::span<const double> diag);
  static Matrix FromRows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  Vector column(std::size_t j) const;

  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& entries() { return entries_; }

  Matrix Transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix Multiply(const Matrix& a, const Matrix& b);
// a^T * b without forming the transpose.
Matrix MultiplyTransposeA(const Matrix& a, const Matrix& b);
// a * b^T without forming the transpose.
Matrix MultiplyTransposeB(const Matrix& a, const Matrix& b);
Vector Apply(const Matrix& a, std::span<const double> v);
Vector ApplyTransposed(const Matrix& a, std::span<const double> v);

Matrix Add(const Matrix& a, const Matrix& b);
Matrix Subtract(const Matrix& a, const Matrix& b);
Matrix Scale(const Matrix& a, double s);

double Trace(const Matrix& a);
double FrobeniusNorm(const Matrix& a);
double MaxAbsDiff(const Matrix& a, const Matrix& b);
bool AllFinite(const Matrix& a);
bool AllFinite(std::span<const double> v);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> v);
double Norm1(std::span<const double> v);
double L1Distance(std::span<const double> a, std::span<const double> b);

}  // namespace taldp

#endif  // TALDP_MATRIX_H_
