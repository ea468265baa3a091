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

#include "fairshuffle/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

namespace {

constexpr double kBoundSlack = 1e-9;

// ln(t / (n - 1)^S)
double LogRatio(double t, double n, int S) {
  return std::log(t) - S * std::log(n - 1.0);
}

}  // namespace

absl::StatusOr<double> EpsilonIs(std::int64_t t, std::int64_t n1, int S) {
  if (n1 < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epsilon undefined (division by zero): batch size ", n1, " < 2"));
  }
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("batch count ", t, " must be at least 1"));
  }
  if (S < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("S = ", S, " must be at least 2"));
  }
  return LogRatio(static_cast<double>(t), static_cast<double>(n1), S);
}

absl::StatusOr<PrivacyBudget> EpsilonFair(const std::vector<BatchTerm>& terms,
                                          int S) {
  if (terms.empty()) {
    return absl::InvalidArgumentError("no protected groups to budget");
  }
  if (S < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("S = ", S, " must be at least 2"));
  }
  std::vector<double> logs;
  PrivacyBudget budget;
  budget.S = S;
  budget.n_p = static_cast<int>(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const BatchTerm& term = terms[i];
    const std::string tag =
        term.tag.empty() ? absl::StrCat("group", i) : term.tag;
    if (!(term.batch_size >= 2.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon undefined (division by zero): group '", tag,
                       "' has batch size ", term.batch_size, " < 2"));
    }
    if (term.batches < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("group '", tag, "' has no batches"));
    }
    const double log_term =
        LogRatio(static_cast<double>(term.batches), term.batch_size, S);
    logs.push_back(log_term);
    budget.per_tag_terms[tag] = std::exp(log_term);
  }
  // log-sum-exp keeps tiny per-group ratios from underflowing.
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0;
  for (double l : logs) sum += std::exp(l - top);
  budget.epsilon =
      top + std::log(sum) - std::lgamma(static_cast<double>(budget.n_p) + 1.0);
  return budget;
}

std::vector<BatchTerm> BatchTerms(const BatchPlan& plan) {
  std::vector<BatchTerm> terms;
  for (const TagBatches& tb : plan.per_tag) {
    terms.push_back({tb.tag, static_cast<std::int64_t>(tb.t()),
                     tb.nominal_size()});
  }
  return terms;
}

absl::StatusOr<CountReport> MakeCountReport(
    std::span<const EncodedTable> true_snapshots,
    std::span<const EncodedTable> shuffled_snapshots, const Query& query,
    const QueryPlan& plan) {
  if (true_snapshots.empty()) {
    return absl::InvalidArgumentError("count report needs a horizon d >= 1");
  }
  if (true_snapshots.size() != shuffled_snapshots.size()) {
    return absl::InvalidArgumentError(
        "true and shuffled horizons differ in length");
  }
  CountReport report;
  report.query = query;
  report.horizon = static_cast<int>(true_snapshots.size());
  for (const Predicate& p : query.predicates) {
    if (std::find(plan.unrelated.begin(), plan.unrelated.end(), p.attribute) !=
        plan.unrelated.end()) {
      report.warnings.push_back(
          absl::StrCat("cross-group query: '", p.attribute,
                       "' is shuffled; bound is diagnostic only"));
    }
  }
  for (std::size_t d = 0; d < true_snapshots.size(); ++d) {
    ASSIGN_OR_RETURN(std::vector<bool> t,
                     EvaluatePredicates(true_snapshots[d], query.predicates));
    ASSIGN_OR_RETURN(
        std::vector<bool> s,
        EvaluatePredicates(shuffled_snapshots[d], query.predicates));
    report.c_true += static_cast<double>(std::count(t.begin(), t.end(), true));
    report.c_shuffled +=
        static_cast<double>(std::count(s.begin(), s.end(), true));
  }
  return report;
}

absl::StatusOr<CountReport> MakeCountReport(const EncodedTable& true_table,
                                            const ShuffledTable& shuffled,
                                            const Query& query,
                                            const QueryPlan& plan, int d) {
  if (d < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("horizon d = ", d, " must be at least 1"));
  }
  const std::vector<EncodedTable> truths(static_cast<std::size_t>(d),
                                         true_table);
  const std::vector<EncodedTable> shuffles(static_cast<std::size_t>(d),
                                           shuffled.table);
  return MakeCountReport(truths, shuffles, query, plan);
}

LossBound ComputeLossBound(const CountReport& report,
                           const PrivacyBudget& budget) {
  LossBound out;
  out.loss = std::abs(report.c_true - report.c_shuffled);
  out.bound = report.c_shuffled * std::abs(std::expm1(budget.epsilon));
  out.satisfied = out.loss <= out.bound + kBoundSlack;
  return out;
}

double Utility(const CountReport& report) {
  const double denom =
      std::max({report.c_true, report.c_shuffled, 1.0});
  return 1.0 - std::abs(report.c_true - report.c_shuffled) / denom;
}

}  // namespace fairshuffle
