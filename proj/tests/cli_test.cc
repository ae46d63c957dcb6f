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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "taldp/data_io.h"
#include "taldp/linear_codec.h"
#include "taldp/synthetic.h"

namespace taldp {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("taldp_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the binary; stdout and stderr land in files next to the outputs.
  int Run(const std::string& args) {
    const std::string cmd = std::string(TALDP_CLI_PATH) + " " + args + " > " +
                            Path("stdout.txt") + " 2> " + Path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string Stdout() const { return ReadTextFile(Path("stdout.txt")); }
  std::string Stderr() const { return ReadTextFile(Path("stderr.txt")); }

  void WriteSphereData() {
    WriteTextFile(Path("data.csv"), FormatCsv(SphereSample(3, 60, 2.0, 4)));
    WriteTextFile(Path("k.csv"), "2,0,0\n0,1,0\n");
  }

  fs::path dir_;
};

TEST_F(CliTest, FitLinearWritesCodecAndReport) {
  WriteSphereData();
  ASSERT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k.csv") + " --epsilon 2 --out " + Path("codec.txt")),
            0)
      << Stderr();
  EXPECT_TRUE(fs::exists(Path("codec.txt")));
  const std::string report = ReadTextFile(Path("codec.txt.report"));
  EXPECT_NE(report.find("z_prime = "), std::string::npos);
  EXPECT_NE(report.find("lower_bound = "), std::string::npos);
  EXPECT_NE(report.find("upper_bound = "), std::string::npos);
  const LinearCodec codec = DeserializeCodec(ReadTextFile(Path("codec.txt")));
  EXPECT_EQ(codec.input_dims(), 3u);
  EXPECT_EQ(Stdout().find('\n'), Stdout().size() - 1);  // one summary line
}

TEST_F(CliTest, FitLinearValidation) {
  WriteSphereData();
  EXPECT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k.csv") + " --epsilon 0 --out " + Path("c.txt")),
            2);
  EXPECT_NE(Stderr().find("epsilon must be positive"), std::string::npos);
  WriteTextFile(Path("k2.csv"), "1,0\n");
  EXPECT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k2.csv") + " --epsilon 1 --out " + Path("c.txt")),
            2);
  EXPECT_NE(Stderr().find("task-matrix"), std::string::npos);
  EXPECT_NE(Stderr().find("columns"), std::string::npos);
  EXPECT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k.csv") + " --epsilon 1 --approach privacy-agnostic --out " +
                Path("c.txt")),
            2);
  EXPECT_EQ(Run("fit-linear --data " + Path("missing.csv") + " --task-matrix " +
                Path("k.csv") + " --epsilon 1 --out " + Path("c.txt")),
            2);
  EXPECT_EQ(Run("no-such-verb"), 2);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(CliTest, AnonymizeNoiselessIsNearIdentity) {
  WriteSphereData();
  ASSERT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k.csv") + " --approach task-agnostic --epsilon 1e12 --out " +
                Path("codec.txt")),
            0)
      << Stderr();
  ASSERT_EQ(Run("anonymize --codec " + Path("codec.txt") + " --data " +
                Path("data.csv") + " --seed 3 --out " + Path("a.csv")),
            0)
      << Stderr();
  const Matrix in = LoadCsv(Path("data.csv"), false).values;
  const Matrix out = LoadCsv(Path("a.csv"), false).values;
  EXPECT_LT(MaxAbsDiff(in, out), 1e-6);
  WriteTextFile(Path("bad.csv"), "1,2\n3,4\n");
  EXPECT_EQ(Run("anonymize --codec " + Path("codec.txt") + " --data " +
                Path("bad.csv") + " --out " + Path("b.csv")),
            2);
}

TEST_F(CliTest, TheoryMatchesClosedForms) {
  const std::string eps = "2.8284271247461903";
  ASSERT_EQ(Run("theory --lambda 4,0,0,0 --r 1 --epsilon-grid " + eps +
                " --z-pa 2 --out " + Path("t.csv")),
            0)
      << Stderr();
  const DataMatrix t = LoadCsv(Path("t.csv"), true);
  ASSERT_EQ(t.samples(), 1u);
  EXPECT_NEAR(t.values(0, 2), 2.0, 1e-9);
  EXPECT_NEAR(t.values(0, 3), 3.2, 1e-9);
  EXPECT_NEAR(t.values(0, 4), 8.0 / 3.0, 1e-9);
  EXPECT_EQ(Run("theory --lambda 4,0 --r 1 --epsilon-grid '' --out " + Path("u.csv")), 2);
  EXPECT_EQ(Run("theory --lambda 4,x --r 1 --epsilon-grid 1 --out " + Path("u.csv")), 2);
  ASSERT_EQ(Run("theory --lambda 0,0,0 --r 1 --epsilon-grid 1,2 --z-pa 1 --out " +
                Path("z.csv")),
            0)
      << Stderr();
  const DataMatrix z = LoadCsv(Path("z.csv"), true);
  for (std::size_t r = 0; r < z.samples(); ++r) {
    for (std::size_t c = 2; c < z.dims(); ++c) EXPECT_EQ(z.values(r, c), 0.0);
  }
}

TEST_F(CliTest, EvaluateAndSensitivity) {
  WriteSphereData();
  ASSERT_EQ(Run("fit-linear --data " + Path("data.csv") + " --task-matrix " +
                Path("k.csv") + " --epsilon 2 --out " + Path("codec.txt")),
            0);
  ASSERT_EQ(Run("evaluate --codec " + Path("codec.txt") + " --data " +
                Path("data.csv") + " --draws 10 --out " + Path("e.txt")),
            0)
      << Stderr();
  EXPECT_NE(ReadTextFile(Path("e.txt")).find("mean_loss = "), std::string::npos);
  ASSERT_EQ(Run("sensitivity --data " + Path("data.csv") + " --epsilon 2 --out " +
                Path("s.txt")),
            0)
      << Stderr();
  EXPECT_NE(ReadTextFile(Path("s.txt")).find("delta1 = "), std::string::npos);
  EXPECT_EQ(Run("sensitivity --data " + Path("data.csv") + " --epsilon -1 --out " +
                Path("s.txt")),
            2);
}

TEST_F(CliTest, FitGeneralRoundTrip) {
  const LabeledSample s = RegressionSample(60, 2);
  WriteTextFile(Path("x.csv"), FormatCsv(s.inputs));
  WriteTextFile(Path("y.csv"), FormatCsv(s.targets));
  WriteTextFile(Path("cfg.txt"),
                "epsilon_grid = 4\nz = 3\neta = 0.2\nepochs = 5\nnoise_draws = 5\n");
  ASSERT_EQ(Run("fit-general --data " + Path("x.csv") + " --targets " + Path("y.csv") +
                " --config " + Path("cfg.txt") + " --task-epochs 50 --out " +
                Path("net.txt") + " --trace " + Path("trace.csv")),
            0)
      << Stderr();
  const DataMatrix trace = LoadCsv(Path("trace.csv"), true);
  EXPECT_EQ(trace.samples(), 5u);
  ASSERT_EQ(Run("evaluate --codec " + Path("net.txt") + " --data " + Path("x.csv") +
                " --draws 4 --out " + Path("e.txt")),
            0)
      << Stderr();
  ASSERT_EQ(Run("anonymize --codec " + Path("net.txt") + " --data " + Path("x.csv") +
                " --out " + Path("a.csv")),
            0)
      << Stderr();
  EXPECT_EQ(LoadCsv(Path("a.csv"), false).values.rows(), 60u);
  WriteTextFile(Path("bad_cfg.txt"), "epsilon_grid = 4\nz = 3\n");
  EXPECT_EQ(Run("fit-general --data " + Path("x.csv") + " --targets " + Path("y.csv") +
                " --config " + Path("bad_cfg.txt") + " --out " + Path("n2.txt")),
            2);
}

}  // namespace
}  // namespace taldp
