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

#include "fairshuffle/config.h"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "test_util.h"

namespace fairshuffle {
namespace {

using testing::MessageHas;

TEST(ParseKeyValuesTest, CommentsBlanksAndWhitespace) {
  ASSERT_OK_AND_ASSIGN(auto kv, ParseKeyValues("# header\n\n  a.b =  1 \nc=x=y\n"));
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv["a.b"], "1");
  EXPECT_EQ(kv["c"], "x=y");
}

TEST(ParseKeyValuesTest, Errors) {
  auto dup = ParseKeyValues("a = 1\na = 2\n");
  ASSERT_FALSE(dup.ok());
  EXPECT_TRUE(MessageHas(dup.status(), "line 2"));
  EXPECT_FALSE(ParseKeyValues("no equals sign\n").ok());
  EXPECT_FALSE(ParseKeyValues(" = 3\n").ok());
}

TEST(ParsePipelineConfigTest, Defaults) {
  ASSERT_OK_AND_ASSIGN(PipelineConfig c, ParsePipelineConfig("seed = 9\n"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.fis.master_seed, 9u);
  EXPECT_TRUE(c.synthetic());
  EXPECT_EQ(c.schema, AdmissionsSchema());
  EXPECT_EQ(c.report_queries.size(), 1u);
  EXPECT_EQ(c.grid_shufflers, std::vector<int>{c.fis.S});
  EXPECT_EQ(c.grid_batch_sizes, std::vector<int>{c.fis.target_batch_size});
  EXPECT_EQ(c.output_dir, "out");
}

TEST(ParsePipelineConfigTest, AllKeys) {
  constexpr char kText[] = R"(
seed = 11
synth.n = 500
synth.female_fraction = 0.4
synth.income_coef = 0.7
synth.area_coef = 0.2
synth.electricity_coef = 0.1
synth.maths_cutoff = 55
synth.income_cutoff = 30000
query.kind = decision
query.predicates = maths >= 60 & physics < 90
query.target = eligible
report.queries = maths >= 60; income >= 50000
report.horizon = 3
plan.theta = 0.6
fis.shufflers = 3
fis.batch_size = 40
fis.batch_counts = F:4, M:5
fis.rounds = 2
fis.shuffle_tied = true
fis.threads = 2
classify.label = eligible
classify.learning_rate = 0.2
classify.iterations = 50
classify.validation_fraction = 0.3
riskmin.lambda = 0.01
riskmin.shufflers = 2, 3
riskmin.batch_sizes = 20, 40, 80
output.dir = results
)";
  ASSERT_OK_AND_ASSIGN(PipelineConfig c, ParsePipelineConfig(kText));
  EXPECT_EQ(c.synth.n, 500);
  EXPECT_EQ(c.synth.female_fraction, 0.4);
  EXPECT_EQ(c.synth.income_cutoff, 30000);
  EXPECT_EQ(c.query.kind, QueryKind::kDecision);
  EXPECT_EQ(c.query.predicates.size(), 2u);
  EXPECT_EQ(c.report_queries.size(), 2u);
  EXPECT_EQ(c.horizon, 3);
  EXPECT_EQ(c.theta, 0.6);
  EXPECT_EQ(c.fis.S, 3);
  EXPECT_EQ(c.fis.target_batch_size, 40);
  EXPECT_EQ(c.fis.batch_counts.at("M"), 5);
  EXPECT_EQ(c.fis.rounds, 2);
  EXPECT_TRUE(c.fis.shuffle_tied);
  EXPECT_EQ(c.fis.threads, 2);
  EXPECT_EQ(c.train.learning_rate, 0.2);
  EXPECT_EQ(c.train.iterations, 50);
  EXPECT_EQ(c.validation_fraction, 0.3);
  EXPECT_EQ(c.lambda, 0.01);
  EXPECT_EQ(c.grid_batch_sizes, (std::vector<int>{20, 40, 80}));
  EXPECT_EQ(c.output_dir, "results");
}

TEST(ParsePipelineConfigTest, SeedIsMandatoryUnlessOverridden) {
  auto missing = ParsePipelineConfig("synth.n = 10\n");
  ASSERT_FALSE(missing.ok());
  EXPECT_TRUE(MessageHas(missing.status(), "seed"));
  ASSERT_OK_AND_ASSIGN(PipelineConfig c,
                       ParsePipelineConfig("seed = 1\n", 77));
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.fis.master_seed, 77u);
}

TEST(ParsePipelineConfigTest, Rejections) {
  const char* bad[] = {
      "seed = 1\nfis.shufler = 2\n",
      "seed = x\n",
      "seed = 1\nfis.shufflers = 1\n",
      "seed = 1\nquery.predicates = height >= 3\n",
      "seed = 1\nquery.kind = average\n",
      "seed = 1\nplan.theta = 0\n",
      "seed = 1\nreport.horizon = 0\n",
      "seed = 1\nfis.shuffle_tied = maybe\n",
      "seed = 1\nfis.batch_counts = F4\n",
      "seed = 1\nclassify.validation_fraction = 1\n",
      "seed = 1\nclassify.label = sex\n",
      "seed = 1\nriskmin.lambda = -1\n",
      "seed = 1\ninput.path = a.csv\n",
      "seed = 1\ninput.path = a.csv\nsynth.n = 4\n"
      "schema.columns = id:identifier, sex:protected\n",
      "seed = 1\nschema.columns = id:identifier, sex:gender\n",
  };
  for (const char* text : bad) {
    EXPECT_FALSE(ParsePipelineConfig(text).ok()) << text;
  }
}

TEST(LoadPipelineConfigTest, InputPathIsRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "fs_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "c.conf");
    out << "seed = 1\ninput.path = data.csv\n"
           "schema.columns = id:identifier, sex:protected, x:numeric\n";
  }
  ASSERT_OK_AND_ASSIGN(PipelineConfig c,
                       LoadPipelineConfig((dir / "c.conf").string()));
  EXPECT_EQ(std::filesystem::path(*c.input_path), dir / "data.csv");
  EXPECT_FALSE(LoadPipelineConfig((dir / "missing.conf").string()).ok());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fairshuffle
