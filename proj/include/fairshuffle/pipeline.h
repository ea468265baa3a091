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

#ifndef FAIRSHUFFLE_PIPELINE_H_
#define FAIRSHUFFLE_PIPELINE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fairshuffle/config.h"
#include "fairshuffle/fairness.h"
#include "fairshuffle/fis.h"
#include "fairshuffle/partition.h"
#include "fairshuffle/privacy.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/riskmin.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

enum class Stage { kSynth, kPlan, kShuffle, kBudget, kReport, kClassify,
                   kRiskmin, kRun };

std::optional<Stage> ParseStage(std::string_view name);
std::string_view StageName(Stage stage);

// Batches, attribute groups, shuffler assignment and the shuffled table for
// one FIS configuration.
struct FisRun {
  TagPartition partition;
  BatchPlan batches;
  AttributeGrouping grouping;
  ShufflerAssignment assignment;
  ShuffledTable shuffled;
};

absl::StatusOr<FisRun> RunFis(const EncodedTable& table, const QueryPlan& plan,
                              const FisConfig& config);

struct CountResult {
  CountReport report;
  LossBound bound;
  double utility = 0;
};

struct ClassifyResult {
  FairClassifier model;
  RatesReport validation_rates;
  RatesReport full_rates;
  DecisionReport decisions;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
};

// Everything computed for a stage; members stay empty when the stage did not
// need them.
struct PipelineResult {
  std::optional<Table> data;
  std::optional<EncodedTable> encoded;
  std::optional<QueryPlan> plan;
  std::optional<FisRun> fis;
  std::optional<std::vector<BatchTerm>> terms;
  std::optional<PrivacyBudget> budget;
  std::optional<CountResult> primary;
  std::vector<CountResult> queries;
  std::optional<ClassifyResult> classify;
  std::optional<std::string> classify_skipped;
  std::optional<HypothesisSpace> space;
  std::optional<RiskReport> risk;
};

// Stratified by tag: each tag's rows are shuffled with a seeded generator and
// the first ceil(fraction * n_i) go to validation.
void SplitExamples(const std::vector<LabeledExample>& examples,
                   double validation_fraction, std::uint64_t seed,
                   std::vector<LabeledExample>* train,
                   std::vector<LabeledExample>* validation);

// Computes the stage and its prerequisites. Errors are prefixed with the
// failing step.
absl::StatusOr<PipelineResult> Execute(const PipelineConfig& config,
                                       Stage stage);

// Writes the stage's report files into config.output_dir.
absl::Status WriteOutputs(const PipelineConfig& config, Stage stage,
                          const PipelineResult& result);

absl::Status RunPipeline(const PipelineConfig& config, Stage stage);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_PIPELINE_H_
