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

#include "fairshuffle/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "absl/strings/str_cat.h"
#include "fairshuffle/random.h"
#include "fairshuffle/reports.h"
#include "fairshuffle/status_macros.h"
#include "fairshuffle/synth.h"

namespace fairshuffle {

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kSynth, "synth"},     {Stage::kPlan, "plan"},
    {Stage::kShuffle, "shuffle"}, {Stage::kBudget, "budget"},
    {Stage::kReport, "report"},   {Stage::kClassify, "classify"},
    {Stage::kRiskmin, "riskmin"}, {Stage::kRun, "run"},
};

absl::Status InStep(std::string_view step, const absl::Status& status) {
  if (status.ok()) return status;
  return absl::Status(status.code(),
                      absl::StrCat(std::string(step), ": ",
                                   std::string(status.message())));
}

#define STEP_ASSIGN(step, lhs, expr)                          \
  do {                                                        \
    auto step_result_ = (expr);                               \
    if (!step_result_.ok()) {                                 \
      return InStep(step, step_result_.status());             \
    }                                                         \
    lhs = *std::move(step_result_);                           \
  } while (0)

struct Needs {
  bool plan = false, fis = false, budget = false, report = false,
       classify = false, riskmin = false;
};

Needs NeedsFor(Stage stage) {
  Needs n;
  switch (stage) {
    case Stage::kSynth:
      break;
    case Stage::kPlan:
    case Stage::kShuffle:
      n.plan = n.fis = true;
      break;
    case Stage::kBudget:
      n.plan = n.fis = n.budget = true;
      break;
    case Stage::kReport:
      n.plan = n.fis = n.budget = n.report = true;
      break;
    case Stage::kClassify:
      n.plan = n.fis = n.classify = true;
      break;
    case Stage::kRiskmin:
      n.plan = n.riskmin = true;
      break;
    case Stage::kRun:
      n.plan = n.fis = n.budget = n.report = n.classify = n.riskmin = true;
      break;
  }
  return n;
}

absl::StatusOr<Table> LoadData(const PipelineConfig& config) {
  if (config.input_path) return LoadTable(*config.input_path, config.schema);
  return SynthGenerate(config.synth, config.seed);
}

absl::StatusOr<PrivacyBudget> BudgetFor(const FisRun& run, int S,
                                        std::vector<BatchTerm>* terms) {
  *terms = BatchTerms(run.batches);
  return EpsilonFair(*terms, S);
}

absl::StatusOr<CountResult> CountFor(const EncodedTable& table,
                                     const FisRun& run, const Query& query,
                                     const QueryPlan& plan, int horizon,
                                     const PrivacyBudget& budget) {
  CountResult out;
  ASSIGN_OR_RETURN(out.report, MakeCountReport(table, run.shuffled, query,
                                               plan, horizon));
  out.bound = ComputeLossBound(out.report, budget);
  out.utility = Utility(out.report);
  return out;
}

absl::StatusOr<ClassifyResult> Classify(const PipelineConfig& config,
                                        const QueryPlan& plan,
                                        const EncodedTable& shuffled) {
  // The analyst only ever sees the shuffled table.
  ASSIGN_OR_RETURN(ExampleSet data,
                   BuildExamples(shuffled, plan, config.label));
  ExampleSet train{data.feature_names, {}};
  std::vector<LabeledExample> validation;
  SplitExamples(data.examples, config.validation_fraction, config.seed,
                &train.examples, &validation);

  ClassifyResult out;
  out.train_rows = train.examples.size();
  out.validation_rows = validation.size();
  ASSIGN_OR_RETURN(FairClassifier base, TrainBase(train, config.train));
  ASSIGN_OR_RETURN(out.model, EqualizeThresholds(std::move(base), validation));

  std::map<std::string, int> predictions, truth;
  std::map<std::string, std::string> tags;
  for (const LabeledExample& ex : validation) {
    const double score = out.model.Score(ex.features);
    predictions[ex.id] = score >= out.model.thresholds.at(ex.tag) ? 1 : 0;
    truth[ex.id] = ex.label;
    tags[ex.id] = ex.tag;
  }
  ASSIGN_OR_RETURN(out.validation_rates,
                   ComputeRates(predictions, truth, tags));

  ASSIGN_OR_RETURN(out.decisions, SubgroupClassify(out.model, shuffled));
  predictions.clear();
  truth.clear();
  tags.clear();
  for (const auto& [tag, ids] : out.decisions.positives) {
    for (const std::string& id : ids) predictions[id] = 1;
  }
  for (const auto& [tag, ids] : out.decisions.negatives) {
    for (const std::string& id : ids) predictions[id] = 0;
  }
  for (const LabeledExample& ex : data.examples) {
    truth[ex.id] = ex.label;
    tags[ex.id] = ex.tag;
  }
  ASSIGN_OR_RETURN(out.full_rates, ComputeRates(predictions, truth, tags));
  return out;
}

HypothesisSpace SpaceFor(const PipelineConfig& config) {
  HypothesisSpace space;
  space.lambda = config.lambda;
  for (int S : config.grid_shufflers) {
    for (int size : config.grid_batch_sizes) {
      FisConfig candidate = config.fis;
      candidate.S = S;
      candidate.target_batch_size = size;
      candidate.batch_counts.clear();
      space.candidates.push_back(candidate);
    }
  }
  return space;
}

absl::StatusOr<RiskReport> Riskmin(const PipelineConfig& config,
                                   const EncodedTable& table,
                                   const QueryPlan& plan,
                                   const HypothesisSpace& space) {
  CandidateEvaluator evaluate =
      [&](const FisConfig& candidate) -> absl::StatusOr<CandidateOutcome> {
    ASSIGN_OR_RETURN(FisRun run, RunFis(table, plan, candidate));
    std::vector<BatchTerm> terms;
    ASSIGN_OR_RETURN(PrivacyBudget budget, BudgetFor(run, candidate.S, &terms));
    CandidateOutcome outcome;
    outcome.epsilon = budget.epsilon;
    outcome.total_batches = run.batches.total_batches();
    for (const Query& query : config.report_queries) {
      ASSIGN_OR_RETURN(CountResult count, CountFor(table, run, query, plan,
                                                   config.horizon, budget));
      outcome.losses.push_back(count.bound.loss);
    }
    return outcome;
  };
  return Minimize(space, evaluate);
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.close();
  if (!out) {
    return absl::InternalError(
        absl::StrCat("cannot write '", path.string(), "'"));
  }
  return absl::OkStatus();
}

nlohmann::json SkippedJson(const std::string& reason) {
  return {{"status", "skipped"}, {"reason", reason}};
}

}  // namespace

std::optional<Stage> ParseStage(std::string_view name) {
  for (const auto& [stage, text] : kStageNames) {
    if (text == name) return stage;
  }
  return std::nullopt;
}

std::string_view StageName(Stage stage) {
  for (const auto& [s, text] : kStageNames) {
    if (s == stage) return text;
  }
  return "unknown";
}

absl::StatusOr<FisRun> RunFis(const EncodedTable& table, const QueryPlan& plan,
                              const FisConfig& config) {
  RETURN_IF_ERROR(ValidateFisConfig(config));
  FisRun run;
  run.partition = TagRows(table);
  ASSIGN_OR_RETURN(run.batches,
                   MakeBatches(run.partition,
                               ResolveBatchCounts(config, run.partition),
                               config.master_seed));
  ASSIGN_OR_RETURN(run.grouping,
                   GroupAttributes(plan, config.S, config.master_seed));
  ASSIGN_OR_RETURN(
      run.assignment,
      AssignShufflers(run.batches, run.grouping,
                      DefaultPools(run.partition, config.S),
                      config.master_seed));
  ASSIGN_OR_RETURN(run.shuffled, FisShuffle(table, plan, run.batches,
                                            run.grouping, run.assignment,
                                            config));
  return run;
}

void SplitExamples(const std::vector<LabeledExample>& examples,
                   double validation_fraction, std::uint64_t seed,
                   std::vector<LabeledExample>* train,
                   std::vector<LabeledExample>* validation) {
  std::map<std::string, std::vector<std::size_t>> by_tag;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_tag[examples[i].tag].push_back(i);
  }
  std::vector<bool> in_validation(examples.size(), false);
  std::uint64_t tag_index = 0;
  for (auto& [tag, rows] : by_tag) {
    Rng rng(DeriveSeed(seed, SeedDomain::kSplit, {tag_index++}));
    ShuffleInPlace(rng, rows);
    const auto take = static_cast<std::size_t>(
        std::ceil(validation_fraction * static_cast<double>(rows.size())));
    for (std::size_t k = 0; k < std::min(take, rows.size()); ++k) {
      in_validation[rows[k]] = true;
    }
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (in_validation[i] ? validation : train)->push_back(examples[i]);
  }
}

absl::StatusOr<PipelineResult> Execute(const PipelineConfig& config,
                                       Stage stage) {
  const Needs needs = NeedsFor(stage);
  PipelineResult out;
  STEP_ASSIGN("synth", out.data, LoadData(config));
  if (!needs.plan) return out;

  out.encoded = EncodeOneHot(*out.data);
  STEP_ASSIGN("plan", out.plan,
              BuildPlan(config.query, *out.encoded, config.theta));

  if (needs.fis) {
    STEP_ASSIGN("shuffle", out.fis,
                RunFis(*out.encoded, *out.plan, config.fis));
  }
  if (needs.budget) {
    std::vector<BatchTerm> terms;
    STEP_ASSIGN("budget", out.budget,
                BudgetFor(*out.fis, config.fis.S, &terms));
    out.terms = std::move(terms);
  }
  if (needs.report) {
    const Query primary{QueryKind::kCount, config.query.predicates, ""};
    STEP_ASSIGN("report", out.primary,
                CountFor(*out.encoded, *out.fis, primary, *out.plan,
                         config.horizon, *out.budget));
    for (const Query& query : config.report_queries) {
      CountResult count;
      STEP_ASSIGN("report", count,
                  CountFor(*out.encoded, *out.fis, query, *out.plan,
                           config.horizon, *out.budget));
      out.queries.push_back(std::move(count));
    }
  }
  if (needs.classify) {
    if (config.label.empty()) {
      out.classify_skipped = "no classify.label configured";
    } else {
      STEP_ASSIGN("classify", out.classify,
                  Classify(config, *out.plan, out.fis->shuffled.table));
    }
  }
  if (needs.riskmin) {
    out.space = SpaceFor(config);
    STEP_ASSIGN("riskmin", out.risk,
                Riskmin(config, *out.encoded, *out.plan, *out.space));
  }
  return out;
}

absl::Status WriteOutputs(const PipelineConfig& config, Stage stage,
                          const PipelineResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(absl::StrCat(
        "cannot create output directory '", config.output_dir, "': ",
        ec.message()));
  }
  const bool all = stage == Stage::kRun;

  if ((all || stage == Stage::kSynth) && result.data) {
    RETURN_IF_ERROR(WriteFile(dir / "data.csv", FormatTable(*result.data)));
  }
  if ((all || stage == Stage::kPlan) && result.plan && result.fis) {
    RETURN_IF_ERROR(WriteFile(
        dir / "plan.json",
        DumpJson(PlanToJson(config.query, *result.plan, result.fis->batches,
                            result.fis->grouping))));
  }
  if ((all || stage == Stage::kShuffle) && result.fis) {
    absl::StatusOr<Table> decoded = DecodeOneHot(result.fis->shuffled.table);
    if (!decoded.ok()) return InStep("shuffle", decoded.status());
    RETURN_IF_ERROR(WriteFile(dir / "shuffled.csv", FormatTable(*decoded)));
  }
  if ((all || stage == Stage::kBudget) && result.budget) {
    RETURN_IF_ERROR(WriteFile(
        dir / "budget.json",
        DumpJson(BudgetToJson(*result.budget, *result.terms))));
  }
  if ((all || stage == Stage::kReport) && result.primary) {
    nlohmann::json report = CountToJson(result.primary->report,
                                        result.primary->bound,
                                        result.primary->utility);
    nlohmann::json queries = nlohmann::json::array();
    std::size_t satisfied = 0;
    for (const CountResult& q : result.queries) {
      queries.push_back(CountToJson(q.report, q.bound, q.utility));
      if (q.bound.satisfied) ++satisfied;
    }
    report["queries"] = queries;
    report["epsilon"] = result.budget->epsilon;
    report["shuffle_tied"] = config.fis.shuffle_tied;
    // With tied blocks shuffled the bound is no longer guaranteed; it is
    // reported as a diagnostic.
    report["bound_check"] =
        config.fis.shuffle_tied ? "diagnostic" : "guaranteed";
    report["satisfaction_rate"] =
        result.queries.empty()
            ? 1.0
            : static_cast<double>(satisfied) /
                  static_cast<double>(result.queries.size());
    RETURN_IF_ERROR(WriteFile(dir / "count_report.json", DumpJson(report)));
  }
  if (all || stage == Stage::kClassify) {
    if (result.classify) {
      const ClassifyResult& c = *result.classify;
      nlohmann::json rates = {
          {"status", "ok"},
          {"train_rows", c.train_rows},
          {"validation_rows", c.validation_rows},
          {"validation", RatesToJson(c.validation_rates)},
          {"full", RatesToJson(c.full_rates)}};
      nlohmann::json decisions = DecisionsToJson(c.decisions, c.model);
      decisions["status"] = "ok";
      RETURN_IF_ERROR(WriteFile(dir / "rates.json", DumpJson(rates)));
      RETURN_IF_ERROR(WriteFile(dir / "decisions.json", DumpJson(decisions)));
      RETURN_IF_ERROR(
          WriteFile(dir / "model.json", DumpJson(ModelToJson(c.model))));
    } else if (result.classify_skipped) {
      const nlohmann::json skipped = SkippedJson(*result.classify_skipped);
      RETURN_IF_ERROR(WriteFile(dir / "rates.json", DumpJson(skipped)));
      RETURN_IF_ERROR(WriteFile(dir / "decisions.json", DumpJson(skipped)));
    }
  }
  if ((all || stage == Stage::kRiskmin) && result.risk) {
    RETURN_IF_ERROR(WriteFile(dir / "risk.json",
                              DumpJson(RiskToJson(*result.risk,
                                                  *result.space))));
  }
  return absl::OkStatus();
}

absl::Status RunPipeline(const PipelineConfig& config, Stage stage) {
  ASSIGN_OR_RETURN(PipelineResult result, Execute(config, stage));
  return WriteOutputs(config, stage, result);
}

}  // namespace fairshuffle
