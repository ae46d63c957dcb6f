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

#include "taldp/numerics.h"

#include <cmath>

#include <gtest/gtest.h>

#include "taldp/error.h"
#include "taldp/matrix.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

Matrix RandomSpd(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (double& v : a.entries()) v = rng.Normal();
  Matrix spd = MultiplyTransposeA(a, a);
  for (std::size_t i = 0; i < n; ++i) spd(i, i) += 0.5;
  return spd;
}

TEST(CholeskyTest, KnownTwoByTwo) {
  const Matrix spd{{4, 2}, {2, 5}};
  const Matrix l = Cholesky(spd);
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 2.0);
  EXPECT_LT(MaxAbsDiff(MultiplyTransposeB(l, l), spd), 1e-12);
}

TEST(CholeskyTest, IdentityIsFixed) {
  EXPECT_EQ(Cholesky(Matrix::Identity(5)), Matrix::Identity(5));
}

TEST(CholeskyTest, RankDeficientThrows) {
  try {
    Cholesky(Matrix{{1, 1}, {1, 1}});
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPositiveDefinite);
    EXPECT_TRUE(IsNumericalFailure(e.code()));
  }
}

TEST(CholeskyTest, AsymmetricInputRejected) {
  EXPECT_THROW(Cholesky(Matrix{{2, 1}, {0, 2}}), Error);
}

TEST(CholeskyTest, RandomReconstruction) {
  Rng rng(3);
  for (std::size_t n = 1; n <= 8; ++n) {
    const Matrix spd = RandomSpd(n, rng);
    const Matrix l = Cholesky(spd);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(l(i, i), 0.0);
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(l(i, j), 0.0);
    }
    const double rel = FrobeniusNorm(Subtract(MultiplyTransposeB(l, l), spd)) /
                       FrobeniusNorm(spd);
    EXPECT_LT(rel, 1e-9);
  }
}

TEST(SymEigTest, DiagonalInput) {
  const EigenDecomposition eig = SymEig(Matrix{{1, 0}, {0, 4}});
  EXPECT_DOUBLE_EQ(eig.values[0], 4.0);
  EXPECT_DOUBLE_EQ(eig.values[1], 1.0);
  EXPECT_NEAR(std::abs(eig.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(eig.vectors(0, 1)), 1.0, 1e-15);
}

TEST(SymEigTest, TwoByTwoCoupled) {
  const Matrix m{{2, 1}, {1, 2}};
  const EigenDecomposition eig = SymEig(m);
  EXPECT_NEAR(eig.values[0], 3.0, 1e-12);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-12);
  // Q^T M Q must be diagonal with the eigenvalues.
  const Matrix qtmq =
      MultiplyTransposeA(eig.vectors, Multiply(m, eig.vectors));
  EXPECT_NEAR(qtmq(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(qtmq(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(qtmq(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(eig.vectors(0, 0)), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(eig.vectors(0, 0), eig.vectors(1, 0), 1e-12);
}

TEST(SymEigTest, RandomReconstructionAndOrthogonality) {
  Rng rng(11);
  for (std::size_t n = 1; n <= 9; ++n) {
    const Matrix m = RandomSpd(n, rng);
    const EigenDecomposition eig = SymEig(m);
    for (std::size_t k = 1; k < n; ++k) {
      EXPECT_GE(eig.values[k - 1], eig.values[k]);
    }
    const Matrix ql = Multiply(eig.vectors, Matrix::Diagonal(eig.values));
    EXPECT_LT(MaxAbsDiff(MultiplyTransposeB(ql, eig.vectors), m), 1e-8);
    EXPECT_LT(MaxAbsDiff(MultiplyTransposeA(eig.vectors, eig.vectors),
                         Matrix::Identity(n)),
              1e-8);
    // Sign convention: first nonzero entry of each column is non-negative.
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        if (std::abs(eig.vectors(r, c)) > 1e-12) {
          EXPECT_GT(eig.vectors(r, c), 0.0);
          break;
        }
      }
    }
  }
}

TEST(SymEigTest, IterationCapReported) {
  Rng rng(2);
  const Matrix m = RandomSpd(6, rng);
  try {
    SymEig(m, 0);
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoConvergence);
  }
}

TEST(SolveSpdTest, MatchesMultiplication) {
  Rng rng(5);
  const Matrix spd = RandomSpd(4, rng);
  Matrix rhs(4, 2);
  for (double& v : rhs.entries()) v = rng.Normal();
  const Matrix x = SolveSpd(spd, rhs);
  EXPECT_LT(MaxAbsDiff(Multiply(spd, x), rhs), 1e-10);
}

TEST(TriangularTest, ForwardAndBackSubstitution) {
  const Matrix l{{2, 0, 0}, {1, 3, 0}, {-1, 2, 4}};
  const Vector v{2, 7, 9};
  const Vector x = LowerTriInverseApply(l, v);
  const Vector back = Apply(l, x);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], v[i], 1e-14);
  const Vector y = LowerTriTransposeInverseApply(l, v);
  const Vector back_t = ApplyTransposed(l, y);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back_t[i], v[i], 1e-14);
}

TEST(TriangularTest, ZeroPivotThrows) {
  const Matrix l{{1, 0}, {1, 0}};
  EXPECT_THROW(LowerTriInverseApply(l, Vector{1, 1}), Error);
}

TEST(MatrixTest, ProductsAgree) {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  const Matrix b{{1, 0}, {0, 1}, {1, 1}};
  const Matrix ab = Multiply(a, b);
  EXPECT_EQ(ab, (Matrix{{4, 5}, {10, 11}}));
  EXPECT_EQ(MultiplyTransposeA(a.Transposed(), b), ab);
  EXPECT_EQ(MultiplyTransposeB(a, b.Transposed()), ab);
  EXPECT_THROW(Multiply(a, a), Error);
}

TEST(MatrixTest, NormsAndDistances) {
  const Vector a{1, -2, 2};
  const Vector b{0, 0, 0};
  EXPECT_DOUBLE_EQ(Norm2(a), 3.0);
  EXPECT_DOUBLE_EQ(Norm1(a), 5.0);
  EXPECT_DOUBLE_EQ(L1Distance(a, b), 5.0);
  EXPECT_DOUBLE_EQ(Trace(Matrix{{1, 9}, {9, 2}}), 3.0);
}

}  // namespace
}  // namespace taldp
