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

#ifndef FAIRSHUFFLE_CONFIG_H_
#define FAIRSHUFFLE_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/fairness.h"
#include "fairshuffle/fis.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/synth.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

// Flat "key = value" lines; '#' starts a comment line. Keys are dotted
// section paths such as "fis.shufflers". Duplicate keys are rejected.
absl::StatusOr<std::map<std::string, std::string>> ParseKeyValues(
    std::string_view text);

struct PipelineConfig {
  // Exactly one data source: a CSV file or the synthetic generator.
  std::optional<std::string> input_path;
  SynthSpec synth;
  Schema schema;

  Query query;
  // Count queries for count_report.json and the risk minimizer. Defaults to
  // the main query's predicates as a count query.
  std::vector<Query> report_queries;
  int horizon = 1;
  double theta = 0.5;

  FisConfig fis;

  // 0/1 column for the fair classifier; defaults to the decision target.
  std::string label;
  TrainOptions train;
  double validation_fraction = 0.5;

  double lambda = 0;
  std::vector<int> grid_shufflers;
  std::vector<int> grid_batch_sizes;

  std::string output_dir = "out";
  std::uint64_t seed = 0;

  bool synthetic() const { return !input_path.has_value(); }
};

// A seed override replaces the "seed" key, which is otherwise mandatory.
absl::StatusOr<PipelineConfig> ParsePipelineConfig(
    std::string_view text,
    std::optional<std::uint64_t> seed_override = std::nullopt);
absl::StatusOr<PipelineConfig> LoadPipelineConfig(
    const std::string& path,
    std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_CONFIG_H_
