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

#ifndef FAIRSHUFFLE_PARTITION_H_
#define FAIRSHUFFLE_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

// Rows grouped by protected value. Tags are sorted; each member list keeps
// table order. A tag's position in the tags list is its index in derived seeds.
struct TagPartition {
  std::vector<std::string> tags;
  std::map<std::string, std::vector<std::string>> members;

  std::size_t n_p() const { return tags.size(); }
  std::size_t TagIndex(const std::string& tag) const;
};

TagPartition TagRows(const Table& table);
TagPartition TagRows(const EncodedTable& table);

struct TagBatches {
  std::string tag;
  std::vector<std::vector<std::string>> batches;

  std::size_t t() const { return batches.size(); }
  std::size_t rows() const;
  // Average batch size n_i / t_i.
  double nominal_size() const;
};

struct BatchPlan {
  std::vector<TagBatches> per_tag;  // TagPartition order

  std::size_t total_batches() const;
};

// t_i = max(2, floor(n_i / target_batch_size)).
std::map<std::string, int> DefaultBatchCounts(const TagPartition& partition,
                                              int target_batch_size = 50);

// Shuffles each tag's rows with a seeded generator, then deals them into
// t_i contiguous batches; the first n_i mod t_i batches get one extra row.
absl::StatusOr<BatchPlan> MakeBatches(const TagPartition& partition,
                                      const std::map<std::string, int>& counts,
                                      std::uint64_t seed);

struct AttributeGrouping {
  std::vector<std::vector<std::string>> groups;

  std::size_t S() const { return groups.size(); }
};

// Splits the plan's unrelated attributes into S groups of floor(g/S); the
// g mod S leftovers each join a distinct, randomly drawn group.
absl::StatusOr<AttributeGrouping> GroupAttributes(const QueryPlan& plan, int S,
                                                  std::uint64_t seed);

using ShufflerId = int;

// tag -> the S logical shufflers serving that tag.
using ShufflerPools = std::map<std::string, std::vector<ShufflerId>>;

// Tag i gets shufflers [i*S, (i+1)*S).
ShufflerPools DefaultPools(const TagPartition& partition, int S);

struct ShufflerAssignment {
  ShufflerPools pools;
  // [tag index][batch index][group index] -> shuffler id.
  std::vector<std::vector<std::vector<ShufflerId>>> assignment;
};

// Each (tag, batch) draws a uniformly random bijection from attribute groups
// onto that tag's pool.
absl::StatusOr<ShufflerAssignment> AssignShufflers(
    const BatchPlan& batches, const AttributeGrouping& grouping,
    const ShufflerPools& pools, std::uint64_t seed);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_PARTITION_H_
