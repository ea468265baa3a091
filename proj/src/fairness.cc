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

#include "fairshuffle/fairness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z)
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Linear(std::span<const double> params, const std::vector<double>& x) {
  double z = params.back();
  for (std::size_t j = 0; j < x.size(); ++j) z += params[j] * x[j];
  return z;
}

// One achievable operating point of a tag.
struct RatePoint {
  double fpr = 0;
  double fnr = 0;
  std::int64_t errors = 0;
  double threshold = 0;
};

// Lexicographic (errors, threshold) preference inside a window.
bool Better(const RatePoint& a, const RatePoint& b) {
  return std::tie(a.errors, a.threshold) < std::tie(b.errors, b.threshold);
}

std::vector<RatePoint> OperatingPoints(std::vector<ScoredExample> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ScoredExample& a, const ScoredExample& b) {
              return a.score < b.score;
            });
  std::int64_t positives = 0;
  for (const auto& r : rows) positives += r.label;
  const std::int64_t negatives = static_cast<std::int64_t>(rows.size()) - positives;

  std::vector<double> scores;
  for (const auto& r : rows) scores.push_back(r.score);
  const std::vector<double> grid = CandidateThresholds(scores);

  // Sweep thresholds upward; rows below the threshold are predicted negative.
  std::vector<RatePoint> points;
  std::int64_t neg_below = 0;  // true negatives
  std::int64_t pos_below = 0;  // false negatives
  std::size_t k = 0;
  for (double tau : grid) {
    while (k < rows.size() && rows[k].score < tau) {
      (rows[k].label ? pos_below : neg_below) += 1;
      ++k;
    }
    RatePoint p;
    const std::int64_t fp = negatives - neg_below;
    p.fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    p.fnr = static_cast<double>(pos_below) / static_cast<double>(positives);
    p.errors = fp + pos_below;
    p.threshold = tau;
    points.push_back(p);
  }
  return points;
}

}  // namespace

absl::StatusOr<ExampleSet> BuildExamples(const EncodedTable& table,
                                         const QueryPlan& plan,
                                         const std::string& label_column) {
  const auto label_cols = table.ColumnsOf(label_column);
  if (label_cols.size() != 1 || table.columns[label_cols[0]].level) {
    return absl::InvalidArgumentError(absl::StrCat(
        "label column '", label_column, "' must be a numeric 0/1 column"));
  }
  if (!plan.IsTied(label_column)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "label column '", label_column,
        "' is not tied; shuffling would detach labels from their rows"));
  }
  ExampleSet out;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const std::string& attr = table.columns[c].attribute;
    if (attr == label_column || !plan.IsTied(attr)) continue;
    feature_cols.push_back(c);
    out.feature_names.push_back(table.columns[c].name);
  }
  for (std::size_t r = 0; r < table.n(); ++r) {
    const double label = table.matrix[r][label_cols[0]];
    if (label != 0.0 && label != 1.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("row '", table.ids[r], "': label ", label,
                       " is not 0 or 1"));
    }
    LabeledExample ex;
    ex.id = table.ids[r];
    ex.tag = table.tags[r];
    ex.label = static_cast<int>(label);
    for (std::size_t c : feature_cols) ex.features.push_back(table.matrix[r][c]);
    out.examples.push_back(std::move(ex));
  }
  return out;
}

absl::StatusOr<std::map<std::string, std::vector<std::string>>> GroupClassify(
    const ShuffledTable& shuffled) {
  std::map<std::string, std::vector<std::string>> groups;
  const EncodedTable& t = shuffled.table;
  for (std::size_t r = 0; r < t.n(); ++r) {
    if (r >= t.tags.size() || t.tags[r].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row '", t.ids[r], "' has no tag"));
    }
    groups[t.tags[r]].push_back(t.ids[r]);
  }
  return groups;
}

double FairClassifier::Score(std::span<const double> features) const {
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    z += weights[j] * (features[j] - feature_means[j]) / feature_scales[j];
  }
  static const double kLow = std::numeric_limits<double>::min();
  static const double kHigh = std::nextafter(1.0, 0.0);
  return std::clamp(Sigmoid(z), kLow, kHigh);
}

double MeanLogLoss(std::span<const double> params,
                   const std::vector<std::vector<double>>& x,
                   std::span<const int> y) {
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = Linear(params, x[i]);
    total += Softplus(z) - y[i] * z;
  }
  return total / static_cast<double>(x.size());
}

std::vector<double> MeanLogLossGradient(
    std::span<const double> params, const std::vector<std::vector<double>>& x,
    std::span<const int> y) {
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double residual = Sigmoid(Linear(params, x[i])) - y[i];
    for (std::size_t j = 0; j < x[i].size(); ++j) grad[j] += residual * x[i][j];
    grad.back() += residual;
  }
  for (double& g : grad) g /= static_cast<double>(x.size());
  return grad;
}

absl::StatusOr<FairClassifier> TrainBase(const ExampleSet& data,
                                         const TrainOptions& options) {
  const auto& examples = data.examples;
  std::set<int> labels;
  for (const auto& ex : examples) labels.insert(ex.label);
  if (examples.size() < 2 || labels.size() < 2) {
    return absl::FailedPreconditionError(
        "degenerate training set: need at least two examples of both labels");
  }
  const std::size_t k = data.feature_names.size();
  for (const auto& ex : examples) {
    if (ex.features.size() != k) {
      return absl::InvalidArgumentError(absl::StrCat(
          "example '", ex.id, "' has ", ex.features.size(),
          " features, expected ", k));
    }
  }

  FairClassifier model;
  model.feature_order = data.feature_names;
  model.feature_means.assign(k, 0.0);
  model.feature_scales.assign(k, 1.0);
  const double n = static_cast<double>(examples.size());
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0;
    for (const auto& ex : examples) mean += ex.features[j];
    mean /= n;
    double var = 0;
    for (const auto& ex : examples) {
      var += (ex.features[j] - mean) * (ex.features[j] - mean);
    }
    const double sd = std::sqrt(var / n);
    model.feature_means[j] = mean;
    model.feature_scales[j] = sd > 0 ? sd : 1.0;
  }

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& ex : examples) {
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = (ex.features[j] - model.feature_means[j]) /
               model.feature_scales[j];
    }
    x.push_back(std::move(row));
    y.push_back(ex.label);
  }

  std::vector<double> params(k + 1, 0.0);
  for (int it = 0; it < options.iterations; ++it) {
    const std::vector<double> grad = MeanLogLossGradient(params, x, y);
    for (std::size_t j = 0; j < params.size(); ++j) {
      params[j] -= options.learning_rate * grad[j];
    }
  }
  model.weights.assign(params.begin(), params.end() - 1);
  model.intercept = params.back();
  return model;
}

absl::StatusOr<RatesReport> ComputeRates(
    const std::map<std::string, int>& predictions,
    const std::map<std::string, int>& truth,
    const std::map<std::string, std::string>& tags) {
  if (predictions.size() != truth.size()) {
    return absl::InvalidArgumentError(
        "predictions and truth cover different rows");
  }
  RatesReport report;
  for (const auto& [id, actual] : truth) {
    auto pred = predictions.find(id);
    auto tag = tags.find(id);
    if (pred == predictions.end() || tag == tags.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row '", id, "' lacks a prediction or tag"));
    }
    TagRates& r = report.per_tag[tag->second];
    if (actual == 1) {
      (pred->second == 1 ? r.tp : r.fn) += 1;
    } else {
      (pred->second == 1 ? r.fp : r.tn) += 1;
    }
  }
  std::vector<double> fprs, fnrs;
  for (auto& [tag, r] : report.per_tag) {
    if (r.fp + r.tn > 0) {
      r.fpr = static_cast<double>(r.fp) / static_cast<double>(r.fp + r.tn);
      fprs.push_back(*r.fpr);
    } else {
      report.warnings.push_back(
          absl::StrCat("tag '", tag, "' has no negatives; FPR undefined"));
    }
    if (r.fn + r.tp > 0) {
      r.fnr = static_cast<double>(r.fn) / static_cast<double>(r.fn + r.tp);
      fnrs.push_back(*r.fnr);
    } else {
      report.warnings.push_back(
          absl::StrCat("tag '", tag, "' has no positives; FNR undefined"));
    }
  }
  auto range = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  report.fpr_gap = range(fprs);
  report.fnr_gap = range(fnrs);
  return report;
}

std::vector<double> CandidateThresholds(std::span<const double> scores) {
  std::vector<double> grid(scores.begin(), scores.end());
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

absl::StatusOr<ThresholdChoice> SearchThresholds(
    const std::vector<ScoredExample>& validation) {
  std::map<std::string, std::vector<ScoredExample>> by_tag;
  for (const auto& ex : validation) by_tag[ex.tag].push_back(ex);
  if (by_tag.empty()) {
    return absl::InvalidArgumentError("empty validation set");
  }
  std::vector<std::string> missing;
  for (const auto& [tag, rows] : by_tag) {
    bool pos = false, neg = false;
    for (const auto& r : rows) (r.label ? pos : neg) = true;
    if (!pos || !neg) missing.push_back(tag);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& t : missing) absl::StrAppend(&list, list.empty() ? "" : ", ", t);
    return absl::FailedPreconditionError(absl::StrCat(
        "validation tags lacking a label class: ", list));
  }

  std::vector<std::string> tags;
  std::vector<std::vector<RatePoint>> points;
  std::set<double> fpr_values, fnr_values;
  for (const auto& [tag, rows] : by_tag) {
    tags.push_back(tag);
    points.push_back(OperatingPoints(rows));
    for (const auto& p : points.back()) {
      fpr_values.insert(p.fpr);
      fnr_values.insert(p.fnr);
    }
  }

  // Window with lower corner (a, b) has size D(a, b) = max over tags of the
  // smallest max(fpr - a, fnr - b) among that tag's points above the corner.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto window = [&](double a, double b) {
    double size = 0;
    for (const auto& tag_points : points) {
      double best = kInf;
      for (const auto& p : tag_points) {
        if (p.fpr < a || p.fnr < b) continue;
        best = std::min(best, std::max(p.fpr - a, p.fnr - b));
      }
      size = std::max(size, best);
      if (size == kInf) break;
    }
    return size;
  };

  double best_size = kInf;
  for (double a : fpr_values) {
    for (double b : fnr_values) best_size = std::min(best_size, window(a, b));
  }

  ThresholdChoice choice;
  choice.objective = best_size;
  bool found = false;
  double best_threshold_sum = 0;
  for (double a : fpr_values) {
    for (double b : fnr_values) {
      if (window(a, b) != best_size) continue;
      std::int64_t errors = 0;
      double threshold_sum = 0;
      std::vector<double> picked;
      for (const auto& tag_points : points) {
        const RatePoint* pick = nullptr;
        for (const auto& p : tag_points) {
          if (p.fpr < a || p.fnr < b) continue;
          if (std::max(p.fpr - a, p.fnr - b) > best_size) continue;
          if (!pick || Better(p, *pick)) pick = &p;
        }
        errors += pick->errors;
        threshold_sum += pick->threshold;
        picked.push_back(pick->threshold);
      }
      if (!found ||
          std::tie(errors, threshold_sum) <
              std::tie(choice.errors, best_threshold_sum)) {
        found = true;
        choice.errors = errors;
        best_threshold_sum = threshold_sum;
        for (std::size_t i = 0; i < tags.size(); ++i) {
          choice.thresholds[tags[i]] = picked[i];
        }
      }
    }
  }
  choice.mean_threshold = best_threshold_sum / static_cast<double>(tags.size());
  return choice;
}

absl::StatusOr<FairClassifier> EqualizeThresholds(
    FairClassifier classifier, const std::vector<LabeledExample>& validation) {
  std::vector<ScoredExample> scored;
  scored.reserve(validation.size());
  for (const auto& ex : validation) {
    if (ex.features.size() != classifier.feature_order.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "validation example '", ex.id, "' has the wrong feature count"));
    }
    scored.push_back({ex.tag, classifier.Score(ex.features), ex.label});
  }
  ASSIGN_OR_RETURN(ThresholdChoice choice, SearchThresholds(scored));
  classifier.thresholds = std::move(choice.thresholds);
  return classifier;
}

absl::StatusOr<DecisionReport> SubgroupClassify(
    const FairClassifier& classifier, const EncodedTable& table) {
  std::vector<std::size_t> cols;
  for (const std::string& name : classifier.feature_order) {
    auto c = table.ColumnIndex(name);
    if (!c) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature column '", name, "' missing from table"));
    }
    cols.push_back(*c);
  }
  DecisionReport report;
  std::vector<double> features(cols.size());
  for (std::size_t r = 0; r < table.n(); ++r) {
    auto threshold = classifier.thresholds.find(table.tags[r]);
    if (threshold == classifier.thresholds.end()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "no threshold for tag '", table.tags[r], "' (row '", table.ids[r],
          "')"));
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      features[j] = table.matrix[r][cols[j]];
    }
    auto& bucket = classifier.Score(features) >= threshold->second
                       ? report.positives
                       : report.negatives;
    bucket[table.tags[r]].push_back(table.ids[r]);
  }
  // Every tag appears in both maps, possibly with an empty list.
  for (const auto& [tag, unused] : classifier.thresholds) {
    report.positives[tag];
    report.negatives[tag];
  }
  return report;
}

}  // namespace fairshuffle
