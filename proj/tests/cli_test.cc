// Copyright 2026 The Fairshuffle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

Result Invoke(const std::string& args) {
  const std::string cmd =
      std::string("\"") + FAIRSHUFFLE_CLI + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) r.output += buf;
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fs_cli_" + std::string(::testing::UnitTest::GetInstance()
                                        ->current_test_info()
                                        ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string WriteConfig(const std::string& text) {
    const fs::path path = dir_ / "c.conf";
    std::ofstream(path) << text;
    return path.string();
  }

  fs::path dir_;
};

constexpr char kSmall[] =
    "seed = 3\nsynth.n = 120\nquery.kind = count\n"
    "query.predicates = maths >= 60\nfis.batch_size = 10\n";

TEST_F(CliTest, RunSucceedsAndWritesReports) {
  const std::string config = WriteConfig(kSmall);
  Result r = Invoke("run --config " + config + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir_ / "o" / "budget.json"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "risk.json"));
}

TEST_F(CliTest, StageFlagAndPositionalAgree) {
  const std::string config = WriteConfig(kSmall);
  Result r = Invoke("--stage budget --config " + config + " --out " +
                 (dir_ / "o").string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir_ / "o" / "budget.json"));
  EXPECT_FALSE(fs::exists(dir_ / "o" / "risk.json"));
  r = Invoke("plan --stage budget --config " + config);
  EXPECT_EQ(r.exit_code, 2);
  r = Invoke("everything --config " + config);
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, SeedOverrideChangesOutput) {
  const std::string config = WriteConfig(kSmall);
  ASSERT_EQ(Invoke("synth --config " + config + " --out " + (dir_ / "a").string())
                .exit_code, 0);
  ASSERT_EQ(Invoke("synth --config " + config + " --seed 4 --out " +
                (dir_ / "b").string()).exit_code, 0);
  std::ifstream a(dir_ / "a" / "data.csv"), b(dir_ / "b" / "data.csv");
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_NE(sa, sb);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(Invoke("run").exit_code, 2);
  EXPECT_EQ(Invoke("run --config " + (dir_ / "absent.conf").string()).exit_code, 2);
  Result r = Invoke("run --config " + WriteConfig("seed = 1\nbogus.key = 2\n"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("bogus.key"), std::string::npos);
}

TEST_F(CliTest, StageFailureExitsThreeAndNamesTheStep) {
  const std::string config =
      WriteConfig(std::string(kSmall) + "fis.shufflers = 9\n");
  Result r = Invoke("run --config " + config + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("stage 'run' failed: shuffle: fewer unrelated "
                          "attributes than shuffler groups"),
            std::string::npos)
      << r.output;
}

}  // namespace
