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

#include "fairshuffle/riskmin.h"

#include <cmath>

#include "fairshuffle/config.h"
#include "fairshuffle/pipeline.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairshuffle {
namespace {

using testing::MessageHas;

double UniformUnit(Rng& rng) {
  return static_cast<double>(UniformIndex(rng, 1000001)) / 1e6;
}

TEST(EmpiricalRiskTest, Examples) {
  EXPECT_EQ(*EmpiricalRisk(std::vector<double>{0}), 0.0);
  EXPECT_EQ(*EmpiricalRisk(std::vector<double>{0, 10}), 5.0);
  EXPECT_FALSE(EmpiricalRisk(std::vector<double>{}).ok());
  EXPECT_FALSE(EmpiricalRisk(std::vector<double>{1, -1}).ok());
  EXPECT_FALSE(EmpiricalRisk(std::vector<double>{NAN}).ok());
}

TEST(EmpiricalRiskTest, BudgetConsistentLossesStayUnderScaledCounts) {
  Rng rng(97);
  for (int trial = 0; trial < 500; ++trial) {
    const double epsilon =
        static_cast<double>(UniformIndex(rng, 4001)) / 1000.0 - 2.0;
    const std::size_t n = 1 + UniformIndex(rng, 10);
    std::vector<double> losses, rhs;
    for (std::size_t i = 0; i < n; ++i) {
      const double c_fs = static_cast<double>(UniformIndex(rng, 1000));
      const double cap = std::exp(epsilon) * c_fs;
      losses.push_back(std::floor(cap * UniformUnit(rng)));
      rhs.push_back(cap);
    }
    double mean_rhs = 0;
    for (double v : rhs) mean_rhs += v / static_cast<double>(n);
    ASSERT_OK_AND_ASSIGN(double er, EmpiricalRisk(losses));
    EXPECT_LE(er, mean_rhs * (1 + 1e-12));
  }
}

TEST(RegularizedRiskTest, Examples) {
  EXPECT_EQ(RegularizedRisk(5, 2, 8, 0.5), 13.0);
  EXPECT_EQ(RegularizedRisk(5, 2, 8, 0.0), 5.0);
  EXPECT_EQ(Penalty(3, 7), 21.0);
}

TEST(RegularizedRiskTest, PenaltyIsLinearInLambda) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const double er = UniformUnit(rng) * 50;
    const int S = 1 + static_cast<int>(UniformIndex(rng, 6));
    const std::size_t t = 1 + UniformIndex(rng, 100);
    const double lambda = UniformUnit(rng);
    const double one = RegularizedRisk(er, S, t, lambda) - er;
    const double two = RegularizedRisk(er, S, t, 2 * lambda) - er;
    EXPECT_NEAR(two, 2 * one, 1e-12 * std::max(1.0, two));
  }
}

HypothesisSpace SpaceOf(std::size_t n, double lambda) {
  HypothesisSpace space;
  space.lambda = lambda;
  for (std::size_t i = 0; i < n; ++i) {
    FisConfig c;
    c.S = 1 + static_cast<int>(i % 3);
    c.target_batch_size = static_cast<int>(i);  // marks the candidate
    space.candidates.push_back(c);
  }
  return space;
}

CandidateEvaluator Fixed(std::vector<std::vector<double>> losses,
                         std::vector<std::size_t> batches = {}) {
  return [losses, batches](const FisConfig& c)
             -> absl::StatusOr<CandidateOutcome> {
    const auto i = static_cast<std::size_t>(c.target_batch_size);
    if (losses[i].empty()) return absl::InvalidArgumentError("no batches");
    return CandidateOutcome{losses[i], -1.0,
                            batches.empty() ? 1 : batches[i]};
  };
}

TEST(MinimizeTest, SingletonIsChosen) {
  ASSERT_OK_AND_ASSIGN(RiskReport r, Minimize(SpaceOf(1, 0), Fixed({{7}})));
  EXPECT_EQ(r.chosen, 0u);
  EXPECT_EQ(r.candidates[0].empirical_risk, 7.0);
}

TEST(MinimizeTest, LowerRiskWins) {
  ASSERT_OK_AND_ASSIGN(RiskReport r,
                       Minimize(SpaceOf(2, 0), Fixed({{2, 4}, {4}})));
  EXPECT_EQ(r.candidates[0].regularized_risk, 3.0);
  EXPECT_EQ(r.candidates[1].regularized_risk, 4.0);
  EXPECT_EQ(r.chosen, 0u);
}

TEST(MinimizeTest, TiesGoToLowestIndex) {
  ASSERT_OK_AND_ASSIGN(RiskReport r,
                       Minimize(SpaceOf(3, 0), Fixed({{5}, {1}, {1}})));
  EXPECT_EQ(r.chosen, 1u);
}

TEST(MinimizeTest, InfeasibleCandidatesAreSkipped) {
  ASSERT_OK_AND_ASSIGN(RiskReport r,
                       Minimize(SpaceOf(3, 0), Fixed({{}, {4}, {}})));
  EXPECT_EQ(r.chosen, 1u);
  EXPECT_FALSE(r.candidates[0].feasible);
  EXPECT_EQ(r.candidates[0].error, "no batches");
  auto none = Minimize(SpaceOf(2, 0), Fixed({{}, {}}));
  ASSERT_FALSE(none.ok());
  EXPECT_TRUE(MessageHas(none.status(), "infeasible"));
  EXPECT_FALSE(Minimize(SpaceOf(0, 0), Fixed({})).ok());
  EXPECT_FALSE(Minimize(SpaceOf(1, -1), Fixed({{1}})).ok());
}

TEST(MinimizeTest, MatchesExhaustiveReevaluation) {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + UniformIndex(rng, 20);
    const double lambda =
        UniformIndex(rng, 3) == 0 ? 0.0 : UniformUnit(rng) * 0.1;
    std::vector<std::vector<double>> losses(n);
    std::vector<std::size_t> batches(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (UniformIndex(rng, 6) == 0) continue;  // infeasible
      const std::size_t q = 1 + UniformIndex(rng, 4);
      for (std::size_t j = 0; j < q; ++j) {
        losses[i].push_back(static_cast<double>(UniformIndex(rng, 8)));
      }
      batches[i] = 1 + UniformIndex(rng, 40);
    }
    const HypothesisSpace space = SpaceOf(n, lambda);
    auto r = Minimize(space, Fixed(losses, batches));

    std::optional<std::size_t> best;
    double best_risk = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (losses[i].empty()) continue;
      double sum = 0;
      for (double l : losses[i]) sum += l;
      const double risk =
          sum / static_cast<double>(losses[i].size()) +
          lambda * space.candidates[i].S * static_cast<double>(batches[i]);
      if (!best || risk < best_risk) {
        best = i;
        best_risk = risk;
      }
    }
    if (!best) {
      EXPECT_FALSE(r.ok());
      continue;
    }
    ASSERT_OK(r.status());
    EXPECT_EQ(r->chosen, *best) << "trial " << trial;
    EXPECT_NEAR(r->candidates[r->chosen].regularized_risk, best_risk, 1e-12);
    for (const auto& c : r->candidates) {
      if (!c.feasible) continue;
      EXPECT_NEAR(c.regularized_risk, c.empirical_risk + lambda * c.penalty,
                  1e-12);
      EXPECT_LE(r->candidates[r->chosen].regularized_risk,
                c.regularized_risk);
    }
  }
}

constexpr char kTiedCountConfig[] = R"(
seed = 5
synth.n = 300
query.kind = count
query.predicates = maths >= 60
report.queries = maths >= 60; maths >= 40 & maths < 80
fis.shuffle_tied = false
riskmin.lambda = 0
riskmin.shufflers = 2, 3
riskmin.batch_sizes = 10, 25
)";

TEST(MinimizePipelineTest, TiedQueriesHaveZeroRiskAndPickIndexZero) {
  for (std::uint64_t seed : {1, 2, 3}) {
    ASSERT_OK_AND_ASSIGN(PipelineConfig config,
                         ParsePipelineConfig(kTiedCountConfig, seed));
    ASSERT_OK_AND_ASSIGN(PipelineResult result,
                         Execute(config, Stage::kRiskmin));
    ASSERT_TRUE(result.risk.has_value());
    EXPECT_EQ(result.risk->candidates.size(), 4u);
    for (const auto& c : result.risk->candidates) {
      EXPECT_TRUE(c.feasible) << c.error;
      EXPECT_EQ(c.empirical_risk, 0.0);
    }
    EXPECT_EQ(result.risk->chosen, 0u);
  }
}

TEST(MinimizePipelineTest, Deterministic) {
  ASSERT_OK_AND_ASSIGN(PipelineConfig config,
                       ParsePipelineConfig(kTiedCountConfig, std::nullopt));
  config.lambda = 0.01;
  ASSERT_OK_AND_ASSIGN(PipelineResult a, Execute(config, Stage::kRiskmin));
  ASSERT_OK_AND_ASSIGN(PipelineResult b, Execute(config, Stage::kRiskmin));
  ASSERT_EQ(a.risk->candidates.size(), b.risk->candidates.size());
  EXPECT_EQ(a.risk->chosen, b.risk->chosen);
  for (std::size_t i = 0; i < a.risk->candidates.size(); ++i) {
    EXPECT_EQ(a.risk->candidates[i].regularized_risk,
              b.risk->candidates[i].regularized_risk);
    EXPECT_EQ(a.risk->candidates[i].epsilon, b.risk->candidates[i].epsilon);
  }
}

}  // namespace
}  // namespace fairshuffle
