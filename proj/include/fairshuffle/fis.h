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

#ifndef FAIRSHUFFLE_FIS_H_
#define FAIRSHUFFLE_FIS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/partition.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

struct FisConfig {
  int S = 2;
  // tag -> t_i. Empty means DefaultBatchCounts(partition, target_batch_size).
  std::map<std::string, int> batch_counts;
  int target_batch_size = 50;
  std::uint64_t master_seed = 0;
  // false: only unrelated attribute groups move; tied sub-records stay with
  // their row ID. true: the tied block is permuted as one more unit.
  bool shuffle_tied = false;
  int rounds = 1;
  // Worker threads for independent shuffle units. Output does not depend on
  // this value.
  int threads = 1;
};

absl::Status ValidateFisConfig(const FisConfig& config);

// Batch counts for a partition: the configured map if non-empty, otherwise
// the defaults for target_batch_size.
std::map<std::string, int> ResolveBatchCounts(const FisConfig& config,
                                              const TagPartition& partition);

// One (round, tag, batch, group) cell. Position k of the batch receives the
// sub-record previously held by position permutation[k].
struct ShuffleUnit {
  int round = 0;
  std::size_t tag = 0;
  std::size_t batch = 0;
  // Attribute group index; S denotes the tied block when shuffle_tied.
  std::size_t group = 0;
  ShufflerId shuffler = -1;
  std::vector<std::size_t> permutation;
};

struct ShuffledTable {
  EncodedTable table;
  // Diagnostics only; never exported.
  std::vector<ShuffleUnit> provenance;
};

// Seed of the generator for one shuffle unit.
std::uint64_t UnitSeed(std::uint64_t master_seed, int round, std::size_t tag,
                       std::size_t batch, std::size_t group);

// Fairly iterative shuffling. For each round, each tag and each batch in
// order, every attribute group's column block is permuted among the batch's
// rows by an independent uniform permutation seeded with UnitSeed(). Row IDs
// and tags never move.
absl::StatusOr<ShuffledTable> FisShuffle(const EncodedTable& table,
                                         const QueryPlan& plan,
                                         const BatchPlan& batches,
                                         const AttributeGrouping& grouping,
                                         const ShufflerAssignment& assignment,
                                         const FisConfig& config);

struct RrRequest {
  int S = 2;
  int batches = 1;          // t, used by the closed form only
  int rows_per_batch = 2;   // n
  int trials = 10000;
  std::uint64_t seed = 0;
};

struct RrEstimate {
  double empirical_rr = 0;    // p / (1 - p); +inf when p == 1
  double theoretical_rr = 0;  // t / (n - 1)^S
  int trials = 0;
  double match_probability = 0;
};

// Monte-Carlo probability that, after one pass of S independent group
// permutations over a batch of n rows, every group sub-record at a fixed row
// ID is still that row's original.
absl::StatusOr<RrEstimate> EstimateRr(const RrRequest& request);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_FIS_H_
