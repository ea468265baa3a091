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

#ifndef FAIRSHUFFLE_QUERYPLAN_H_
#define FAIRSHUFFLE_QUERYPLAN_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

enum class QueryKind { kCount, kDecision };

enum class Comparator { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view ComparatorSymbol(Comparator op);

struct Predicate {
  std::string attribute;
  Comparator op = Comparator::kEq;
  std::string value;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

// A count query asks how many rows satisfy every predicate. A decision
// query additionally names a ground-truth label column as its target and
// always keeps the protected attribute in scope.
struct Query {
  QueryKind kind = QueryKind::kCount;
  std::vector<Predicate> predicates;
  // Column whose values define the correlation event. Empty means the
  // predicate-satisfaction indicator.
  std::string target;

  friend bool operator==(const Query&, const Query&) = default;
};

// "maths >= 90", "living_area == urban". Operators: == != < <= > >=.
absl::StatusOr<Predicate> ParsePredicate(std::string_view text);
// Conjunction separated by '&'. Empty text gives no predicates.
absl::StatusOr<std::vector<Predicate>> ParsePredicates(std::string_view text);
std::string FormatPredicates(const std::vector<Predicate>& predicates);

absl::Status ValidateQuery(const Query& query, const Schema& schema);

// Attributes named by predicates and target, in first-mention order; decision
// queries append the protected attribute if not already present.
absl::StatusOr<std::vector<std::string>> SelectQueryAttributes(
    const Query& query, const Schema& schema);

// Per-row conjunction of the predicates over an encoded table. Categorical
// and protected attributes support only == and !=.
absl::StatusOr<std::vector<bool>> EvaluatePredicates(
    const EncodedTable& table, const std::vector<Predicate>& predicates);

// Pearson product-moment correlation. A zero-variance input yields 0 and sets
// *constant (when given) instead of failing.
absl::StatusOr<double> Pearson(std::span<const double> x,
                               std::span<const double> y,
                               bool* constant = nullptr);

struct CorrelationReport {
  // attribute -> r against the target event; for a categorical attribute,
  // the indicator correlation with the largest magnitude.
  std::map<std::string, double> entries;
  double theta = 0.5;
  std::vector<std::string> warnings;
};

struct QueryPlan {
  std::vector<std::string> c_attrs;    // query-selected, protected excluded
  std::vector<std::string> d_attrs;    // correlated background attributes
  std::vector<std::string> tied;       // c_attrs + d_attrs, schema order
  std::vector<std::string> unrelated;  // everything else, schema order
  CorrelationReport correlations;

  std::size_t m() const { return tied.size(); }
  std::size_t g() const { return unrelated.size(); }
  bool IsTied(std::string_view attribute) const;
};

// The target event vector used for correlations.
absl::StatusOr<std::vector<double>> TargetEvent(const Query& query,
                                                const EncodedTable& table);

absl::StatusOr<QueryPlan> BuildPlan(const Query& query,
                                    const EncodedTable& table,
                                    double theta = 0.5);

// Attribute-by-attribute correlations, for inspection only; plans use the
// attribute-vs-target entries. A categorical pair takes the signed r of
// largest magnitude over its indicator column pairs.
struct CorrelationMatrix {
  std::vector<std::string> attributes;  // schema order
  std::vector<std::vector<double>> r;
};

absl::StatusOr<CorrelationMatrix> AttributeCorrelations(
    const EncodedTable& table);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_QUERYPLAN_H_
