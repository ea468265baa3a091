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

#include "fairshuffle/fis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fis_checks.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairshuffle {
namespace {

using testing::MessageHas;

struct Fixture {
  EncodedTable table;
  QueryPlan plan;
  BatchPlan batches;
  AttributeGrouping grouping;
  ShufflerAssignment assignment;
};

// Columns: id, tag, then k numeric attributes whose value in row r is
// 1000 * attribute + r, so every cell is distinct. The first m attributes
// are tied.
Fixture MakeFixture(int n, int k, std::size_t m, int tags, int t, int S,
                    std::uint64_t seed) {
  std::vector<Column> cols = {{"id", ColumnKind::kIdentifier},
                              {"tag", ColumnKind::kProtected}};
  for (int a = 0; a < k; ++a) {
    cols.push_back({absl::StrCat("a", a), ColumnKind::kNumeric});
  }
  Schema schema = *Schema::Create(cols);
  std::vector<Row> rows;
  for (int r = 0; r < n; ++r) {
    Row row = {absl::StrCat("r", r), absl::StrCat("T", r % tags)};
    for (int a = 0; a < k; ++a) row.emplace_back(1000.0 * a + r);
    rows.push_back(row);
  }
  Fixture f;
  f.table = EncodeOneHot(*Table::Create(schema, rows));
  f.plan = testing::SplitPlan(schema, m);
  TagPartition p = TagRows(f.table);
  std::map<std::string, int> counts;
  for (const auto& tag : p.tags) counts[tag] = t;
  f.batches = *MakeBatches(p, counts, seed);
  f.grouping = *GroupAttributes(f.plan, S, seed);
  f.assignment = *AssignShufflers(f.batches, f.grouping, DefaultPools(p, S),
                                  seed);
  return f;
}

absl::StatusOr<ShuffledTable> Shuffle(const Fixture& f, FisConfig cfg) {
  return FisShuffle(f.table, f.plan, f.batches, f.grouping, f.assignment, cfg);
}

// Position k of a batch holds the value that position perm[k] held before.
std::vector<std::size_t> RecoverPermutation(const EncodedTable& before,
                                            const EncodedTable& after,
                                            const std::vector<std::string>& ids,
                                            std::size_t col) {
  std::vector<std::size_t> perm;
  for (const auto& id : ids) {
    const double v = after.matrix[*after.RowOf(id)][col];
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (before.matrix[*before.RowOf(ids[j])][col] == v) perm.push_back(j);
    }
  }
  return perm;
}

TEST(FisShuffleTest, InvariantsOnRandomTables) {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    testing::RandomTableSpec spec;
    spec.tags = 1 + static_cast<int>(UniformIndex(rng, 3));
    spec.n = spec.tags * 4 + static_cast<int>(UniformIndex(rng, 150));
    spec.k = 2 + static_cast<int>(UniformIndex(rng, 10));
    const Table t = testing::RandomTable(rng, spec);
    const int S = 2 + static_cast<int>(UniformIndex(rng, spec.k - 1));
    const std::size_t m = UniformIndex(rng, spec.k - S + 1);
    EncodedTable e = EncodeOneHot(t);
    QueryPlan plan = testing::SplitPlan(t.schema(), m);
    FisConfig cfg;
    cfg.S = S;
    cfg.target_batch_size = 2 + static_cast<int>(UniformIndex(rng, 20));
    cfg.master_seed = trial;
    cfg.shuffle_tied = UniformIndex(rng, 2) == 1;
    cfg.rounds = 1 + static_cast<int>(UniformIndex(rng, 3));
    TagPartition p = TagRows(e);
    ASSERT_OK_AND_ASSIGN(BatchPlan bp,
                         MakeBatches(p, ResolveBatchCounts(cfg, p), trial));
    ASSERT_OK_AND_ASSIGN(AttributeGrouping ag, GroupAttributes(plan, S, trial));
    ASSERT_OK_AND_ASSIGN(ShufflerAssignment sa,
                         AssignShufflers(bp, ag, DefaultPools(p, S), trial));
    ASSERT_OK_AND_ASSIGN(ShuffledTable out,
                         FisShuffle(e, plan, bp, ag, sa, cfg));
    EXPECT_OK(testing::CheckFisInvariants(e, out.table, plan, bp, ag,
                                          cfg.shuffle_tied));
    std::size_t units_per_round = 0;
    for (const auto& tb : bp.per_tag) {
      units_per_round += tb.t() * (ag.S() + (cfg.shuffle_tied ? 1 : 0));
    }
    EXPECT_EQ(out.provenance.size(), units_per_round * cfg.rounds);
  }
}

TEST(FisShuffleTest, ProvenanceReplaysFromUnitSeeds) {
  Fixture f = MakeFixture(40, 6, 2, 2, 3, 2, 5);
  FisConfig cfg;
  cfg.master_seed = 77;
  cfg.rounds = 2;
  ASSERT_OK_AND_ASSIGN(ShuffledTable out, Shuffle(f, cfg));
  // Replay every unit in order on a copy.
  auto matrix = f.table.matrix;
  for (const ShuffleUnit& u : out.provenance) {
    Rng rng(UnitSeed(cfg.master_seed, u.round, u.tag, u.batch, u.group));
    const auto& ids = f.batches.per_tag[u.tag].batches[u.batch];
    ASSERT_EQ(u.permutation, UniformPermutation(rng, ids.size()));
    EXPECT_EQ(u.shuffler, f.assignment.assignment[u.tag][u.batch][u.group]);
    const auto cols = testing::BlockColumns(f.table, f.grouping.groups[u.group]);
    auto snapshot = matrix;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const std::size_t dst = *f.table.RowOf(ids[k]);
      const std::size_t src = *f.table.RowOf(ids[u.permutation[k]]);
      for (auto c : cols) matrix[dst][c] = snapshot[src][c];
    }
  }
  EXPECT_EQ(matrix, out.table.matrix);
}

TEST(FisShuffleTest, DeterministicAndScheduleIndependent) {
  Fixture f = MakeFixture(200, 9, 3, 3, 4, 3, 8);
  FisConfig cfg;
  cfg.S = 3;
  cfg.master_seed = 123;
  cfg.rounds = 2;
  ASSERT_OK_AND_ASSIGN(ShuffledTable a, Shuffle(f, cfg));
  ASSERT_OK_AND_ASSIGN(ShuffledTable b, Shuffle(f, cfg));
  cfg.threads = 4;
  ASSERT_OK_AND_ASSIGN(ShuffledTable c, Shuffle(f, cfg));
  EXPECT_EQ(a.table.matrix, b.table.matrix);
  EXPECT_EQ(a.table.matrix, c.table.matrix);
  ASSERT_EQ(a.provenance.size(), c.provenance.size());
  for (std::size_t i = 0; i < a.provenance.size(); ++i) {
    EXPECT_EQ(a.provenance[i].permutation, c.provenance[i].permutation);
  }
  cfg.master_seed = 124;
  ASSERT_OK_AND_ASSIGN(ShuffledTable d, Shuffle(f, cfg));
  EXPECT_NE(a.table.matrix, d.table.matrix);
}

TEST(FisShuffleTest, BatchOfTwoSwapsHalfTheTime) {
  Fixture f = MakeFixture(4, 2, 0, 1, 2, 2, 1);
  const auto& ids = f.batches.per_tag[0].batches[0];
  ASSERT_EQ(ids.size(), 2u);
  const std::size_t col = f.table.ColumnsOf(f.grouping.groups[0][0])[0];
  int swaps = 0;
  const int seeds = 10000;
  for (int seed = 0; seed < seeds; ++seed) {
    FisConfig cfg;
    cfg.master_seed = seed;
    ASSERT_OK_AND_ASSIGN(ShuffledTable out, Shuffle(f, cfg));
    auto perm = RecoverPermutation(f.table, out.table, ids, col);
    if (perm == std::vector<std::size_t>{1, 0}) ++swaps;
  }
  EXPECT_NEAR(static_cast<double>(swaps) / seeds, 0.5, 0.02);
}

TEST(FisShuffleTest, BatchOfFourPermutationsUniform) {
  Fixture f = MakeFixture(8, 2, 0, 1, 2, 2, 1);
  const auto& ids = f.batches.per_tag[0].batches[0];
  ASSERT_EQ(ids.size(), 4u);
  const std::size_t col = f.table.ColumnsOf(f.grouping.groups[0][0])[0];
  std::map<std::vector<std::size_t>, std::int64_t> seen;
  for (int seed = 0; seed < 10000; ++seed) {
    FisConfig cfg;
    cfg.master_seed = seed;
    ASSERT_OK_AND_ASSIGN(ShuffledTable out, Shuffle(f, cfg));
    ++seen[RecoverPermutation(f.table, out.table, ids, col)];
  }
  ASSERT_EQ(seen.size(), 24u);
  std::vector<std::int64_t> counts;
  for (const auto& [perm, c] : seen) counts.push_back(c);
  EXPECT_GT(testing::UniformChiSquarePValue(counts), 0.001);
}

TEST(FisShuffleTest, TiedBlockMovesOnlyWhenRequested) {
  Fixture f = MakeFixture(60, 5, 2, 2, 3, 3, 4);
  FisConfig cfg;
  cfg.S = 3;
  cfg.master_seed = 9;
  ASSERT_OK_AND_ASSIGN(ShuffledTable fixed, Shuffle(f, cfg));
  cfg.shuffle_tied = true;
  ASSERT_OK_AND_ASSIGN(ShuffledTable moved, Shuffle(f, cfg));
  const auto tied = testing::BlockColumns(f.table, f.plan.tied);
  int moved_rows = 0;
  for (std::size_t r = 0; r < f.table.n(); ++r) {
    EXPECT_EQ(testing::SubRecord(fixed.table, r, tied),
              testing::SubRecord(f.table, r, tied));
    if (testing::SubRecord(moved.table, r, tied) !=
        testing::SubRecord(f.table, r, tied)) {
      ++moved_rows;
    }
  }
  EXPECT_GT(moved_rows, 0);
  EXPECT_OK(testing::CheckFisInvariants(f.table, moved.table, f.plan,
                                        f.batches, f.grouping, true));
}

TEST(FisShuffleTest, RejectsInconsistentPlans) {
  Fixture f = MakeFixture(20, 4, 1, 2, 2, 2, 3);
  FisConfig cfg;

  Fixture unknown = f;
  unknown.batches.per_tag[0].batches[0][0] = "ghost";
  auto s = Shuffle(unknown, cfg);
  ASSERT_FALSE(s.ok());
  EXPECT_TRUE(MessageHas(s.status(), "ghost"));

  Fixture tied_in_group = f;
  tied_in_group.grouping.groups[0].push_back(f.plan.tied[0]);
  EXPECT_FALSE(Shuffle(tied_in_group, cfg).ok());

  Fixture tiny = f;
  auto& batches = tiny.batches.per_tag[0].batches;
  batches.push_back({batches[0].back()});
  batches[0].pop_back();
  tiny.assignment.assignment[0].push_back({0, 1});
  EXPECT_FALSE(Shuffle(tiny, cfg).ok());

  Fixture cross = f;
  std::swap(cross.batches.per_tag[0].batches[0][0],
            cross.batches.per_tag[1].batches[0][0]);
  EXPECT_FALSE(Shuffle(cross, cfg).ok());

  cfg.S = 3;
  EXPECT_FALSE(Shuffle(f, cfg).ok());
  cfg.S = 1;
  EXPECT_FALSE(Shuffle(f, cfg).ok());
  cfg.S = 2;
  cfg.rounds = 0;
  EXPECT_FALSE(Shuffle(f, cfg).ok());
}

// Exact probability that a fixed row keeps all S sub-records, by enumerating
// every S-tuple of permutations of n rows.
double EnumeratedMatchProbability(int n, int S) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const std::size_t total = static_cast<std::size_t>(std::pow(perms.size(), S));
  std::size_t home = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    bool all = true;
    for (int s = 0; s < S; ++s) {
      all = all && perms[rest % perms.size()][0] == 0;
      rest /= perms.size();
    }
    if (all) ++home;
  }
  return static_cast<double>(home) / static_cast<double>(total);
}

TEST(EstimateRrTest, SingleShufflerAgreesWithClosedForm) {
  ASSERT_OK_AND_ASSIGN(RrEstimate e,
                       EstimateRr({.S = 1, .batches = 1, .rows_per_batch = 2,
                                   .trials = 10000, .seed = 1}));
  const double p = EnumeratedMatchProbability(2, 1);
  EXPECT_DOUBLE_EQ(p, 0.5);
  EXPECT_NEAR(e.empirical_rr, p / (1 - p), 0.05);
  EXPECT_DOUBLE_EQ(e.theoretical_rr, 1.0);
  EXPECT_EQ(e.trials, 10000);
}

TEST(EstimateRrTest, TwoShufflersDivergeFromClosedForm) {
  ASSERT_OK_AND_ASSIGN(RrEstimate e,
                       EstimateRr({.S = 2, .batches = 1, .rows_per_batch = 2,
                                   .trials = 10000, .seed = 1}));
  const double p = EnumeratedMatchProbability(2, 2);
  EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_NEAR(e.empirical_rr, 1.0 / 3.0, 0.05);
  EXPECT_DOUBLE_EQ(e.theoretical_rr, 1.0);
  EXPECT_GT(std::abs(e.empirical_rr - e.theoretical_rr), 0.5);
}

TEST(EstimateRrTest, MatchesEnumerationOnSmallInstances) {
  for (int n : {2, 3, 4}) {
    for (int S : {1, 2, 3}) {
      ASSERT_OK_AND_ASSIGN(RrEstimate e,
                           EstimateRr({.S = S, .batches = 1,
                                       .rows_per_batch = n, .trials = 20000,
                                       .seed = static_cast<std::uint64_t>(n * 10 + S)}));
      EXPECT_NEAR(e.match_probability, EnumeratedMatchProbability(n, S), 0.01)
          << "n=" << n << " S=" << S;
      if (e.match_probability < 1) {
        EXPECT_DOUBLE_EQ(e.empirical_rr,
                         e.match_probability / (1 - e.match_probability));
      }
    }
  }
}

TEST(EstimateRrTest, Preconditions) {
  EXPECT_FALSE(EstimateRr({.trials = 0}).ok());
  EXPECT_FALSE(EstimateRr({.rows_per_batch = 1}).ok());
}

}  // namespace
}  // namespace fairshuffle
