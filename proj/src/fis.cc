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
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "fairshuffle/random.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

absl::Status ValidateFisConfig(const FisConfig& config) {
  if (config.S < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("S = ", config.S, " must be at least 2"));
  }
  if (config.rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds = ", config.rounds, " must be at least 1"));
  }
  if (config.target_batch_size < 2) {
    return absl::InvalidArgumentError("target batch size must be at least 2");
  }
  if (config.threads < 1) {
    return absl::InvalidArgumentError("threads must be at least 1");
  }
  return absl::OkStatus();
}

std::map<std::string, int> ResolveBatchCounts(const FisConfig& config,
                                              const TagPartition& partition) {
  if (!config.batch_counts.empty()) return config.batch_counts;
  return DefaultBatchCounts(partition, config.target_batch_size);
}

std::uint64_t UnitSeed(std::uint64_t master_seed, int round, std::size_t tag,
                       std::size_t batch, std::size_t group) {
  return DeriveSeed(master_seed, SeedDomain::kShuffle,
                    {static_cast<std::uint64_t>(round), tag, batch, group});
}

namespace {

struct UnitWork {
  std::vector<std::size_t> rows;     // matrix row indices, batch order
  std::vector<std::size_t> columns;  // matrix column indices of the block
};

void ApplyUnit(const UnitWork& work, const std::vector<std::size_t>& perm,
               std::vector<std::vector<double>>& matrix) {
  // Gather then scatter; units touch disjoint cells, so this is race-free.
  std::vector<std::vector<double>> block(work.rows.size());
  for (std::size_t k = 0; k < work.rows.size(); ++k) {
    const auto& src = matrix[work.rows[perm[k]]];
    block[k].reserve(work.columns.size());
    for (std::size_t c : work.columns) block[k].push_back(src[c]);
  }
  for (std::size_t k = 0; k < work.rows.size(); ++k) {
    auto& dst = matrix[work.rows[k]];
    for (std::size_t j = 0; j < work.columns.size(); ++j) {
      dst[work.columns[j]] = block[k][j];
    }
  }
}

}  // namespace

absl::StatusOr<ShuffledTable> FisShuffle(const EncodedTable& table,
                                         const QueryPlan& plan,
                                         const BatchPlan& batches,
                                         const AttributeGrouping& grouping,
                                         const ShufflerAssignment& assignment,
                                         const FisConfig& config) {
  RETURN_IF_ERROR(ValidateFisConfig(config));
  if (grouping.S() != static_cast<std::size_t>(config.S)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attribute grouping has ", grouping.S(), " groups, config S = ",
        config.S));
  }
  if (assignment.assignment.size() != batches.per_tag.size()) {
    return absl::InvalidArgumentError(
        "shuffler assignment does not match the batch plan");
  }

  // Column blocks: one per attribute group, plus the tied block if requested.
  std::vector<std::vector<std::size_t>> blocks;
  std::set<std::string> grouped;
  for (const auto& group : grouping.groups) {
    std::vector<std::size_t> cols;
    for (const std::string& attr : group) {
      auto c = table.ColumnsOf(attr);
      if (c.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("attribute '", attr, "' is not in the table"));
      }
      if (plan.IsTied(attr)) {
        return absl::InvalidArgumentError(
            absl::StrCat("tied attribute '", attr, "' placed in a group"));
      }
      grouped.insert(attr);
      cols.insert(cols.end(), c.begin(), c.end());
    }
    blocks.push_back(std::move(cols));
  }
  if (grouped != std::set<std::string>(plan.unrelated.begin(),
                                       plan.unrelated.end())) {
    return absl::InvalidArgumentError(
        "attribute groups do not cover exactly the unrelated attributes");
  }
  if (config.shuffle_tied) {
    std::vector<std::size_t> cols;
    for (const std::string& attr : plan.tied) {
      auto c = table.ColumnsOf(attr);
      if (c.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("tied attribute '", attr, "' is not in the table"));
      }
      cols.insert(cols.end(), c.begin(), c.end());
    }
    blocks.push_back(std::move(cols));
  }

  // Resolve batch rows once.
  std::set<std::size_t> seen_rows;
  std::vector<std::vector<std::vector<std::size_t>>> batch_rows;
  for (std::size_t i = 0; i < batches.per_tag.size(); ++i) {
    const TagBatches& tb = batches.per_tag[i];
    if (assignment.assignment[i].size() != tb.t()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "shuffler assignment for tag '", tb.tag, "' has wrong batch count"));
    }
    std::vector<std::vector<std::size_t>> per_batch;
    for (const auto& batch : tb.batches) {
      if (batch.size() < 2) {
        return absl::InvalidArgumentError(
            absl::StrCat("tag '", tb.tag, "' has a batch smaller than 2"));
      }
      std::vector<std::size_t> rows;
      for (const std::string& id : batch) {
        auto r = table.RowOf(id);
        if (!r) {
          return absl::InvalidArgumentError(
              absl::StrCat("unknown row ID '", id, "' in batch plan"));
        }
        if (table.tags[*r] != tb.tag) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row '", id, "' batched under tag '", tb.tag,
              "' but tagged '", table.tags[*r], "'"));
        }
        if (!seen_rows.insert(*r).second) {
          return absl::InvalidArgumentError(
              absl::StrCat("row '", id, "' appears in two batches"));
        }
        rows.push_back(*r);
      }
      per_batch.push_back(std::move(rows));
    }
    batch_rows.push_back(std::move(per_batch));
  }

  ShuffledTable out{.table = table};
  for (int round = 0; round < config.rounds; ++round) {
    // Units of one round touch disjoint (rows x columns) cells.
    std::vector<ShuffleUnit> units;
    std::vector<UnitWork> work;
    for (std::size_t i = 0; i < batch_rows.size(); ++i) {
      for (std::size_t b = 0; b < batch_rows[i].size(); ++b) {
        for (std::size_t j = 0; j < blocks.size(); ++j) {
          ShuffleUnit unit{.round = round, .tag = i, .batch = b, .group = j};
          if (j < grouping.S()) unit.shuffler = assignment.assignment[i][b][j];
          units.push_back(std::move(unit));
          work.push_back({batch_rows[i][b], blocks[j]});
        }
      }
    }
    auto run = [&](std::size_t u) {
      ShuffleUnit& unit = units[u];
      Rng rng(UnitSeed(config.master_seed, unit.round, unit.tag, unit.batch,
                       unit.group));
      unit.permutation = UniformPermutation(rng, work[u].rows.size());
      ApplyUnit(work[u], unit.permutation, out.table.matrix);
    };
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.threads),
                              units.size());
    if (workers <= 1) {
      for (std::size_t u = 0; u < units.size(); ++u) run(u);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t u = next++; u < units.size(); u = next++) run(u);
        });
      }
    }
    for (auto& unit : units) out.provenance.push_back(std::move(unit));
  }
  return out;
}

absl::StatusOr<RrEstimate> EstimateRr(const RrRequest& request) {
  if (request.trials < 1) {
    return absl::InvalidArgumentError("trials must be at least 1");
  }
  if (request.rows_per_batch < 2) {
    return absl::InvalidArgumentError("rows per batch must be at least 2");
  }
  if (request.S < 1 || request.batches < 1) {
    return absl::InvalidArgumentError("S and batch count must be positive");
  }
  const auto n = static_cast<std::size_t>(request.rows_per_batch);
  Rng rng(DeriveSeed(request.seed, SeedDomain::kRrEstimate, {}));
  int matches = 0;
  for (int trial = 0; trial < request.trials; ++trial) {
    bool all_home = true;
    // Every group is permuted even after a miss so the stream layout does
    // not depend on outcomes.
    for (int s = 0; s < request.S; ++s) {
      const std::vector<std::size_t> perm = UniformPermutation(rng, n);
      all_home = all_home && perm[0] == 0;
    }
    if (all_home) ++matches;
  }
  RrEstimate out;
  out.trials = request.trials;
  out.match_probability =
      static_cast<double>(matches) / static_cast<double>(request.trials);
  out.empirical_rr = matches == request.trials
                         ? std::numeric_limits<double>::infinity()
                         : out.match_probability / (1.0 - out.match_probability);
  out.theoretical_rr =
      static_cast<double>(request.batches) /
      std::pow(static_cast<double>(n - 1), request.S);
  if (matches == request.trials && request.trials >= 64) {
    return absl::InternalError(absl::StrCat(
        "shuffler defect: row kept its own record in all ", request.trials,
        " trials"));
  }
  return out;
}

}  // namespace fairshuffle
