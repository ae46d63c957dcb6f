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

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "taldp/error.h"
#include "taldp/rng.h"

namespace taldp {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::kInvalidArgument;
}

TEST(ParseCsvTest, PlainNumericTable) {
  const DataMatrix d = ParseCsv("1,2\n3,4\n5,6\n", false);
  EXPECT_EQ(d.samples(), 3u);
  EXPECT_EQ(d.dims(), 2u);
  EXPECT_TRUE(d.names.empty());
  EXPECT_EQ(d.values(2, 1), 6.0);
}

TEST(ParseCsvTest, HeaderCaptured) {
  const DataMatrix d = ParseCsv("a, b\r\n1,2\r\n3.5,-4e-1\r\n", true);
  ASSERT_EQ(d.names.size(), 2u);
  EXPECT_EQ(d.names[0], "a");
  EXPECT_EQ(d.names[1], "b");
  EXPECT_EQ(d.samples(), 2u);
  EXPECT_DOUBLE_EQ(d.values(1, 1), -0.4);
}

TEST(ParseCsvTest, NonNumericCellNamesPosition) {
  try {
    ParseCsv("1,2\n3,x\n", false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos);
  }
}

TEST(ParseCsvTest, StructuralErrors) {
  EXPECT_EQ(CodeOf([] { ParseCsv("1,2\n3\n", false); }), ErrorCode::kRaggedRows);
  EXPECT_EQ(CodeOf([] { ParseCsv("a,b\n", true); }), ErrorCode::kEmptyData);
  EXPECT_EQ(CodeOf([] { ParseCsv("1,nan\n", false); }), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { LoadCsv("/nonexistent/file.csv", false); }),
            ErrorCode::kIo);
}

TEST(FormatCsvTest, RoundTripsExactly) {
  Rng rng(9);
  Matrix m(5, 3);
  for (double& v : m.entries()) v = rng.Normal() * 1e3;
  m(0, 0) = 1e-310;
  const DataMatrix back = ParseCsv(FormatCsv(m, {"x", "y", "z"}), true);
  EXPECT_EQ(back.values, m);
  EXPECT_EQ(back.names[2], "z");
}

TEST(NormalizeTest, PerDimensionColumn) {
  DataMatrix d;
  d.values = Matrix{{0, 5}, {2, 7}};
  const NormalizedData nd = Normalize(d, NormalizationMode::kPerDimension);
  EXPECT_DOUBLE_EQ(nd.data.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(nd.data.values(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(nd.spec.shift[1], 6.0);
  EXPECT_DOUBLE_EQ(nd.spec.scale[1], 1.0);
}

TEST(NormalizeTest, AlreadyNormalizedIsUnchanged) {
  DataMatrix d;
  d.values = Matrix{{-1, 1}, {1, -1}};
  const NormalizedData nd = Normalize(d, NormalizationMode::kPerDimension);
  EXPECT_LT(MaxAbsDiff(nd.data.values, d.values), 1e-12);
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(nd.spec.shift[c], 0.0, 1e-12);
    EXPECT_NEAR(nd.spec.scale[c], 1.0, 1e-12);
  }
}

TEST(NormalizeTest, ConstantColumnRejected) {
  DataMatrix d;
  d.values = Matrix{{1, 3}, {2, 3}, {4, 3}};
  EXPECT_EQ(CodeOf([&] { Normalize(d, NormalizationMode::kPerDimension); }),
            ErrorCode::kConstantColumn);
  // Joint mode only needs the table as a whole to vary.
  EXPECT_NO_THROW(Normalize(d, NormalizationMode::kJoint));
}

TEST(NormalizeTest, JointSharesOneShiftAndScale) {
  DataMatrix d;
  d.values = Matrix{{0, 1}, {2, 3}};
  const NormalizedData nd = Normalize(d, NormalizationMode::kJoint);
  EXPECT_DOUBLE_EQ(nd.spec.shift[0], 1.5);
  EXPECT_DOUBLE_EQ(nd.spec.shift[1], 1.5);
  EXPECT_DOUBLE_EQ(nd.spec.scale[0], nd.spec.scale[1]);
  EXPECT_NEAR(nd.spec.scale[0], std::sqrt(1.25), 1e-15);
}

TEST(NormalizeTest, DenormalizeInverts) {
  Rng rng(4);
  DataMatrix d;
  d.values = Matrix(50, 4);
  for (double& v : d.values.entries()) v = 100.0 + 30.0 * rng.Normal();
  for (auto mode : {NormalizationMode::kPerDimension, NormalizationMode::kJoint}) {
    const NormalizedData nd = Normalize(d, mode);
    EXPECT_LT(MaxAbsDiff(Denormalize(nd.spec, nd.data.values), d.values), 1e-10);
  }
}

TEST(ConfigTest, ParseAndFormatRoundTrip) {
  const ExperimentConfig c = ParseConfig(
      "# comment\nepsilon_grid = 1, 2.5,4\nz = 3\neta = 0.2\nepochs = 50\n"
      "seed = 17\nmode = joint\n");
  EXPECT_EQ(c.epsilon_grid, (std::vector<double>{1, 2.5, 4}));
  EXPECT_EQ(c.z, 3);
  EXPECT_EQ(c.epochs, 50);
  EXPECT_EQ(c.inner_steps, 15);
  EXPECT_EQ(c.lr, 1e-3);
  EXPECT_EQ(c.noise_draws, 100);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.mode, NormalizationMode::kJoint);
  const ExperimentConfig back = ParseConfig(FormatConfig(c));
  EXPECT_EQ(FormatConfig(back), FormatConfig(c));
  EXPECT_EQ(back.epsilon_grid, c.epsilon_grid);
}

TEST(ConfigTest, Rejections) {
  const std::string base = "epsilon_grid = 1\nz = 1\neta = 0\n";
  EXPECT_EQ(CodeOf([&] { ParseConfig(base + "colour = red\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([&] { ParseConfig(base + "z = 2\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseConfig("z = 1\neta = 0\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseConfig("epsilon_grid = 1,0\nz = 1\neta = 0\n"); }),
            ErrorCode::kNonPositiveEpsilon);
  EXPECT_EQ(CodeOf([] { ParseConfig("epsilon_grid = 1\nz = 0\neta = 0\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseRealList("  ", "grid"); }), ErrorCode::kParseError);
}

TEST(HashTest, KnownFnvVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(HexDigest(0xabcULL), "0000000000000abc");
}

TEST(TextFileTest, WriteThenRead) {
  const std::string path = ::testing::TempDir() + "taldp_io_test.txt";
  WriteTextFile(path, "hello\n1,2\n");
  EXPECT_EQ(ReadTextFile(path), "hello\n1,2\n");
  std::remove(path.c_str());
}

}  // namespace
}  // namespace taldp
