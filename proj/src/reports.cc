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

#include "fairshuffle/reports.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace fairshuffle {

namespace {

using nlohmann::json;

// Infinite and NaN values have no JSON spelling; they become null.
json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json Optional(const std::optional<double>& v) {
  return v ? Number(*v) : json(nullptr);
}

}  // namespace

json QueryToJson(const Query& query) {
  json out;
  out["kind"] = query.kind == QueryKind::kCount ? "count" : "decision";
  out["predicates"] = FormatPredicates(query.predicates);
  out["target"] = query.target;
  return out;
}

json CorrelationToJson(const CorrelationReport& report) {
  json entries = json::object();
  for (const auto& [attr, r] : report.entries) entries[attr] = Number(r);
  return {{"entries", entries},
          {"theta", report.theta},
          {"warnings", report.warnings}};
}

json PlanToJson(const Query& query, const QueryPlan& plan,
                const BatchPlan& batches, const AttributeGrouping& grouping) {
  json tags = json::array();
  for (const TagBatches& tb : batches.per_tag) {
    json sizes = json::array();
    for (const auto& batch : tb.batches) sizes.push_back(batch.size());
    tags.push_back({{"tag", tb.tag},
                    {"batches", tb.t()},
                    {"rows", tb.rows()},
                    {"batch_size", tb.nominal_size()},
                    {"batch_sizes", sizes}});
  }
  return {{"query", QueryToJson(query)},
          {"c_attrs", plan.c_attrs},
          {"d_attrs", plan.d_attrs},
          {"tied", plan.tied},
          {"unrelated", plan.unrelated},
          {"m", plan.m()},
          {"g", plan.g()},
          {"correlations", CorrelationToJson(plan.correlations)},
          {"shufflers", grouping.S()},
          {"groups", grouping.groups},
          {"tags", tags},
          {"total_batches", batches.total_batches()}};
}

json BudgetToJson(const PrivacyBudget& budget,
                  const std::vector<BatchTerm>& terms) {
  json per_tag = json::array();
  for (const BatchTerm& term : terms) {
    auto it = budget.per_tag_terms.find(term.tag);
    per_tag.push_back(
        {{"tag", term.tag},
         {"batches", term.batches},
         {"batch_size", term.batch_size},
         {"term",
          it == budget.per_tag_terms.end() ? json(nullptr) : Number(it->second)}});
  }
  return {{"epsilon", Number(budget.epsilon)},
          {"n_p", budget.n_p},
          {"shufflers", budget.S},
          {"per_tag", per_tag}};
}

json CountToJson(const CountReport& report, const LossBound& bound,
                 double utility) {
  return {{"query", QueryToJson(report.query)},
          {"c_true", report.c_true},
          {"c_shuffled", report.c_shuffled},
          {"horizon", report.horizon},
          {"average_true", report.average_true()},
          {"average_shuffled", report.average_shuffled()},
          {"loss", bound.loss},
          {"bound", Number(bound.bound)},
          {"satisfied", bound.satisfied},
          {"utility", utility},
          {"warnings", report.warnings}};
}

json RatesToJson(const RatesReport& report) {
  json per_tag = json::object();
  for (const auto& [tag, r] : report.per_tag) {
    per_tag[tag] = {{"tp", r.tp},          {"fp", r.fp},
                    {"tn", r.tn},          {"fn", r.fn},
                    {"fpr", Optional(r.fpr)}, {"fnr", Optional(r.fnr)}};
  }
  return {{"per_tag", per_tag},
          {"fpr_gap", report.fpr_gap},
          {"fnr_gap", report.fnr_gap},
          {"warnings", report.warnings}};
}

json DecisionsToJson(const DecisionReport& report,
                     const FairClassifier& classifier) {
  json per_tag = json::object();
  for (const auto& [tag, threshold] : classifier.thresholds) {
    auto pos = report.positives.find(tag);
    auto neg = report.negatives.find(tag);
    per_tag[tag] = {
        {"threshold", threshold},
        {"positives", pos == report.positives.end()
                          ? std::vector<std::string>{}
                          : pos->second},
        {"negatives", neg == report.negatives.end()
                          ? std::vector<std::string>{}
                          : neg->second}};
  }
  return {{"per_tag", per_tag}};
}

json RiskToJson(const RiskReport& report, const HypothesisSpace& space) {
  json candidates = json::array();
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const CandidateRisk& c = report.candidates[i];
    json entry = {{"index", i}, {"feasible", c.feasible}};
    if (i < space.candidates.size()) {
      entry["shufflers"] = space.candidates[i].S;
      entry["batch_size"] = space.candidates[i].target_batch_size;
    }
    if (c.feasible) {
      entry["empirical_risk"] = c.empirical_risk;
      entry["penalty"] = c.penalty;
      entry["regularized_risk"] = c.regularized_risk;
      entry["epsilon"] = Number(c.epsilon);
    } else {
      entry["error"] = c.error;
    }
    candidates.push_back(std::move(entry));
  }
  return {{"lambda", report.lambda},
          {"chosen", report.chosen},
          {"candidates", candidates}};
}

json RrToJson(const RrEstimate& estimate) {
  return {{"empirical_rr", Number(estimate.empirical_rr)},
          {"theoretical_rr", Number(estimate.theoretical_rr)},
          {"match_probability", estimate.match_probability},
          {"trials", estimate.trials}};
}

json ModelToJson(const FairClassifier& model) {
  return {{"feature_order", model.feature_order},
          {"weights", model.weights},
          {"intercept", model.intercept},
          {"feature_means", model.feature_means},
          {"feature_scales", model.feature_scales},
          {"thresholds", model.thresholds}};
}

absl::StatusOr<FairClassifier> ModelFromJson(const json& in) {
  FairClassifier model;
  try {
    in.at("feature_order").get_to(model.feature_order);
    in.at("weights").get_to(model.weights);
    in.at("intercept").get_to(model.intercept);
    in.at("feature_means").get_to(model.feature_means);
    in.at("feature_scales").get_to(model.feature_scales);
    in.at("thresholds").get_to(model.thresholds);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model: ", e.what()));
  }
  const std::size_t k = model.feature_order.size();
  if (model.weights.size() != k || model.feature_means.size() != k ||
      model.feature_scales.size() != k) {
    return absl::InvalidArgumentError(
        "malformed model: feature vectors differ in length");
  }
  return model;
}

std::string DumpJson(const json& value) { return value.dump(2) + "\n"; }

}  // namespace fairshuffle
