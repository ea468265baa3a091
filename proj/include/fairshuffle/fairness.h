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

#ifndef FAIRSHUFFLE_FAIRNESS_H_
#define FAIRSHUFFLE_FAIRNESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/fis.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

struct LabeledExample {
  std::string id;
  std::vector<double> features;
  std::string tag;
  int label = 0;  // 0 = y_0 (negative), 1 = y_1 (positive)

  friend auto operator<=>(const LabeledExample&,
                          const LabeledExample&) = default;
};

struct ExampleSet {
  // Encoded column names, in feature order.
  std::vector<std::string> feature_names;
  std::vector<LabeledExample> examples;
};

// Features are the encoded columns of the plan's tied attributes, minus the
// label column itself; the label column must hold 0/1.
absl::StatusOr<ExampleSet> BuildExamples(const EncodedTable& table,
                                         const QueryPlan& plan,
                                         const std::string& label_column);

// Layer one: rows grouped by their tag column.
absl::StatusOr<std::map<std::string, std::vector<std::string>>> GroupClassify(
    const ShuffledTable& shuffled);

struct FairClassifier {
  std::vector<std::string> feature_order;
  // Logistic model over standardized features.
  std::vector<double> weights;
  double intercept = 0;
  std::vector<double> feature_means;
  std::vector<double> feature_scales;
  // tag -> cut-point; a row is positive iff score >= threshold.
  std::map<std::string, double> thresholds;

  // Strictly inside (0, 1) for every finite input.
  double Score(std::span<const double> features) const;
};

struct TrainOptions {
  double learning_rate = 0.1;
  int iterations = 500;
};

// Full-batch gradient descent on mean log-loss from zero weights.
absl::StatusOr<FairClassifier> TrainBase(const ExampleSet& data,
                                         const TrainOptions& options = {});

// Mean log-loss and its gradient for parameters (w_1..w_k, b) on an already
// standardized design matrix.
double MeanLogLoss(std::span<const double> params,
                   const std::vector<std::vector<double>>& x,
                   std::span<const int> y);
std::vector<double> MeanLogLossGradient(
    std::span<const double> params, const std::vector<std::vector<double>>& x,
    std::span<const int> y);

struct TagRates {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> fpr;  // absent when the tag has no negatives
  std::optional<double> fnr;  // absent when the tag has no positives
};

struct RatesReport {
  std::map<std::string, TagRates> per_tag;
  double fpr_gap = 0;  // max pairwise |FPR_i - FPR_j| over defined rates
  double fnr_gap = 0;
  std::vector<std::string> warnings;
};

absl::StatusOr<RatesReport> ComputeRates(
    const std::map<std::string, int>& predictions,
    const std::map<std::string, int>& truth,
    const std::map<std::string, std::string>& tags);

struct ScoredExample {
  std::string tag;
  double score = 0;
  int label = 0;
};

struct ThresholdChoice {
  std::map<std::string, double> thresholds;
  double objective = 0;  // max(FPR gap, FNR gap)
  std::int64_t errors = 0;
  double mean_threshold = 0;
};

// Distinct scores of the examples plus 1.0 (everything negative), ascending.
std::vector<double> CandidateThresholds(std::span<const double> scores);

// Chooses one cut-point per tag from that tag's candidate grid, minimizing
// max(FPR gap, FNR gap); ties go to fewer total errors, then to the lower
// mean threshold. Exact over the full grid product, but polynomial: the
// minimal gap is found by sweeping the lower corner of a square window in
// (FPR, FNR) space over all achieved rate pairs.
absl::StatusOr<ThresholdChoice> SearchThresholds(
    const std::vector<ScoredExample>& validation);

// Scores the validation examples and installs the chosen thresholds.
absl::StatusOr<FairClassifier> EqualizeThresholds(
    FairClassifier classifier, const std::vector<LabeledExample>& validation);

struct DecisionReport {
  std::map<std::string, std::vector<std::string>> positives;
  std::map<std::string, std::vector<std::string>> negatives;
};

// Layer two: positive iff score >= threshold(tag).
absl::StatusOr<DecisionReport> SubgroupClassify(
    const FairClassifier& classifier, const EncodedTable& table);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_FAIRNESS_H_
