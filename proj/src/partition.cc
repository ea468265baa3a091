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

#include "fairshuffle/partition.h"

#include <algorithm>
#include <set>

#include "absl/strings/str_cat.h"
#include "fairshuffle/random.h"

namespace fairshuffle {

namespace {

TagPartition Partition(const std::vector<std::string>& ids,
                       const std::vector<std::string>& tags) {
  TagPartition out;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    out.members[tags[r]].push_back(ids[r]);
  }
  for (const auto& [tag, unused] : out.members) out.tags.push_back(tag);
  return out;
}

}  // namespace

std::size_t TagPartition::TagIndex(const std::string& tag) const {
  return static_cast<std::size_t>(
      std::find(tags.begin(), tags.end(), tag) - tags.begin());
}

TagPartition TagRows(const Table& table) {
  std::vector<std::string> ids, tags;
  for (std::size_t r = 0; r < table.n(); ++r) {
    ids.push_back(table.id(r));
    tags.push_back(table.protected_value(r));
  }
  return Partition(ids, tags);
}

TagPartition TagRows(const EncodedTable& table) {
  return Partition(table.ids, table.tags);
}

std::size_t TagBatches::rows() const {
  std::size_t n = 0;
  for (const auto& b : batches) n += b.size();
  return n;
}

double TagBatches::nominal_size() const {
  return static_cast<double>(rows()) / static_cast<double>(t());
}

std::size_t BatchPlan::total_batches() const {
  std::size_t n = 0;
  for (const auto& tb : per_tag) n += tb.t();
  return n;
}

std::map<std::string, int> DefaultBatchCounts(const TagPartition& partition,
                                              int target_batch_size) {
  std::map<std::string, int> out;
  for (const std::string& tag : partition.tags) {
    const int n = static_cast<int>(partition.members.at(tag).size());
    out[tag] = std::max(2, n / std::max(1, target_batch_size));
  }
  return out;
}

absl::StatusOr<BatchPlan> MakeBatches(const TagPartition& partition,
                                      const std::map<std::string, int>& counts,
                                      std::uint64_t seed) {
  BatchPlan plan;
  for (std::size_t i = 0; i < partition.tags.size(); ++i) {
    const std::string& tag = partition.tags[i];
    auto it = counts.find(tag);
    if (it == counts.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("no batch count configured for tag '", tag, "'"));
    }
    const int t = it->second;
    if (t < 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "tag '", tag, "': batch count ", t, " must be at least 2"));
    }
    std::vector<std::string> rows = partition.members.at(tag);
    const std::size_t n = rows.size();
    const std::size_t base = n / static_cast<std::size_t>(t);
    if (base < 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "tag '", tag, "': ", n, " rows in ", t,
          " batches; batch size must be >= 2 (epsilon undefined: "
          "(n-1)^S = 0)"));
    }
    Rng rng(DeriveSeed(seed, SeedDomain::kBatching, {i}));
    ShuffleInPlace(rng, rows);

    TagBatches tb{.tag = tag};
    const std::size_t extra = n % static_cast<std::size_t>(t);
    std::size_t next = 0;
    for (std::size_t b = 0; b < static_cast<std::size_t>(t); ++b) {
      const std::size_t size = base + (b < extra ? 1 : 0);
      tb.batches.emplace_back(rows.begin() + next, rows.begin() + next + size);
      next += size;
    }
    plan.per_tag.push_back(std::move(tb));
  }
  return plan;
}

absl::StatusOr<AttributeGrouping> GroupAttributes(const QueryPlan& plan, int S,
                                                  std::uint64_t seed) {
  if (S < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("shuffler groups S = ", S, " must be at least 2"));
  }
  const std::size_t g = plan.unrelated.size();
  const std::size_t s = static_cast<std::size_t>(S);
  if (g < s) {
    return absl::FailedPreconditionError(absl::StrCat(
        "fewer unrelated attributes than shuffler groups (g = ", g,
        ", S = ", S, ")"));
  }
  AttributeGrouping out;
  out.groups.resize(s);
  const std::size_t per = g / s;
  for (std::size_t j = 0; j < s; ++j) {
    out.groups[j].assign(plan.unrelated.begin() + j * per,
                         plan.unrelated.begin() + (j + 1) * per);
  }
  Rng rng(DeriveSeed(seed, SeedDomain::kAttributeGroups, {}));
  const std::vector<std::size_t> targets =
      SampleWithoutReplacement(rng, s, g % s);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    out.groups[targets[k]].push_back(plan.unrelated[per * s + k]);
  }
  return out;
}

ShufflerPools DefaultPools(const TagPartition& partition, int S) {
  ShufflerPools pools;
  for (std::size_t i = 0; i < partition.tags.size(); ++i) {
    auto& pool = pools[partition.tags[i]];
    for (int j = 0; j < S; ++j) pool.push_back(static_cast<int>(i) * S + j);
  }
  return pools;
}

absl::StatusOr<ShufflerAssignment> AssignShufflers(
    const BatchPlan& batches, const AttributeGrouping& grouping,
    const ShufflerPools& pools, std::uint64_t seed) {
  const std::size_t S = grouping.S();
  std::set<ShufflerId> used;
  for (const auto& [tag, pool] : pools) {
    if (pool.size() != S) {
      return absl::InvalidArgumentError(
          absl::StrCat("shuffler pool for tag '", tag, "' has ", pool.size(),
                       " members, expected S = ", S));
    }
    for (ShufflerId id : pool) {
      if (!used.insert(id).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "shuffler ", id, " appears twice across pools"));
      }
    }
  }
  ShufflerAssignment out;
  out.pools = pools;
  for (std::size_t i = 0; i < batches.per_tag.size(); ++i) {
    const TagBatches& tb = batches.per_tag[i];
    auto pool = pools.find(tb.tag);
    if (pool == pools.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("no shuffler pool for tag '", tb.tag, "'"));
    }
    std::vector<std::vector<ShufflerId>> per_batch;
    for (std::size_t b = 0; b < tb.t(); ++b) {
      Rng rng(DeriveSeed(seed, SeedDomain::kShufflerAssignment, {i, b}));
      const std::vector<std::size_t> perm = UniformPermutation(rng, S);
      std::vector<ShufflerId> ids(S);
      for (std::size_t j = 0; j < S; ++j) ids[j] = pool->second[perm[j]];
      per_batch.push_back(std::move(ids));
    }
    out.assignment.push_back(std::move(per_batch));
  }
  return out;
}

}  // namespace fairshuffle
