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

#include "fairshuffle/queryplan.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> ToDouble(std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool Compare(double lhs, Comparator op, double rhs) {
  switch (op) {
    case Comparator::kEq:
      return lhs == rhs;
    case Comparator::kNe:
      return lhs != rhs;
    case Comparator::kLt:
      return lhs < rhs;
    case Comparator::kLe:
      return lhs <= rhs;
    case Comparator::kGt:
      return lhs > rhs;
    case Comparator::kGe:
      return lhs >= rhs;
  }
  return false;
}

}  // namespace

std::string_view ComparatorSymbol(Comparator op) {
  switch (op) {
    case Comparator::kEq:
      return "==";
    case Comparator::kNe:
      return "!=";
    case Comparator::kLt:
      return "<";
    case Comparator::kLe:
      return "<=";
    case Comparator::kGt:
      return ">";
    case Comparator::kGe:
      return ">=";
  }
  return "?";
}

absl::StatusOr<Predicate> ParsePredicate(std::string_view text) {
  // Two-character operators first so "<=" is not read as "<".
  static constexpr std::pair<std::string_view, Comparator> kOps[] = {
      {"==", Comparator::kEq}, {"!=", Comparator::kNe},
      {"<=", Comparator::kLe}, {">=", Comparator::kGe},
      {"<", Comparator::kLt},  {">", Comparator::kGt},
  };
  for (const auto& [symbol, op] : kOps) {
    const auto pos = text.find(symbol);
    if (pos == std::string_view::npos) continue;
    Predicate p;
    p.attribute = std::string(Trim(text.substr(0, pos)));
    p.op = op;
    p.value = std::string(Trim(text.substr(pos + symbol.size())));
    if (p.attribute.empty() || p.value.empty()) break;
    return p;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("cannot parse predicate '", std::string(text), "'"));
}

absl::StatusOr<std::vector<Predicate>> ParsePredicates(std::string_view text) {
  std::vector<Predicate> out;
  if (Trim(text).empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('&', start);
    if (end == std::string_view::npos) end = text.size();
    ASSIGN_OR_RETURN(Predicate p, ParsePredicate(text.substr(start, end - start)));
    out.push_back(std::move(p));
    start = end + 1;
  }
  return out;
}

std::string FormatPredicates(const std::vector<Predicate>& predicates) {
  std::string out;
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (i > 0) out += " & ";
    absl::StrAppend(&out, predicates[i].attribute, " ",
                    std::string(ComparatorSymbol(predicates[i].op)), " ",
                    predicates[i].value);
  }
  return out;
}

absl::Status ValidateQuery(const Query& query, const Schema& schema) {
  for (const Predicate& p : query.predicates) {
    auto kind = schema.KindOf(p.attribute);
    if (!kind) {
      return absl::InvalidArgumentError(
          absl::StrCat("predicate on unknown attribute '", p.attribute, "'"));
    }
    if (*kind == ColumnKind::kIdentifier) {
      return absl::InvalidArgumentError(absl::StrCat(
          "predicate on identifier column '", p.attribute,
          "': identifiers are never query content"));
    }
    if (*kind == ColumnKind::kNumeric) {
      if (!ToDouble(p.value)) {
        return absl::InvalidArgumentError(
            absl::StrCat("predicate on numeric '", p.attribute,
                         "' compares against non-number '", p.value, "'"));
      }
    } else if (p.op != Comparator::kEq && p.op != Comparator::kNe) {
      return absl::InvalidArgumentError(absl::StrCat(
          "attribute '", p.attribute, "' only supports == and !="));
    }
  }
  if (!query.target.empty()) {
    auto kind = schema.KindOf(query.target);
    if (!kind) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown target attribute '", query.target, "'"));
    }
    if (*kind != ColumnKind::kNumeric) {
      return absl::InvalidArgumentError(absl::StrCat(
          "target '", query.target, "' must be a numeric column"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::string>> SelectQueryAttributes(
    const Query& query, const Schema& schema) {
  RETURN_IF_ERROR(ValidateQuery(query, schema));
  std::vector<std::string> out;
  auto add = [&out](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  };
  for (const Predicate& p : query.predicates) add(p.attribute);
  if (!query.target.empty()) add(query.target);
  if (query.kind == QueryKind::kDecision) add(schema.protected_name());
  return out;
}

absl::StatusOr<std::vector<bool>> EvaluatePredicates(
    const EncodedTable& table, const std::vector<Predicate>& predicates) {
  std::vector<bool> keep(table.n(), true);
  for (const Predicate& p : predicates) {
    auto kind = table.schema.KindOf(p.attribute);
    if (!kind || *kind == ColumnKind::kIdentifier) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot evaluate predicate on '", p.attribute, "'"));
    }
    if (*kind == ColumnKind::kNumeric) {
      auto rhs = ToDouble(p.value);
      if (!rhs) {
        return absl::InvalidArgumentError(
            absl::StrCat("'", p.value, "' is not a number"));
      }
      const std::size_t col = table.ColumnsOf(p.attribute).front();
      for (std::size_t r = 0; r < table.n(); ++r) {
        if (!Compare(table.matrix[r][col], p.op, *rhs)) keep[r] = false;
      }
      continue;
    }
    if (p.op != Comparator::kEq && p.op != Comparator::kNe) {
      return absl::InvalidArgumentError(absl::StrCat(
          "attribute '", p.attribute, "' only supports == and !="));
    }
    const bool want_equal = p.op == Comparator::kEq;
    if (*kind == ColumnKind::kProtected) {
      for (std::size_t r = 0; r < table.n(); ++r) {
        if ((table.tags[r] == p.value) != want_equal) keep[r] = false;
      }
      continue;
    }
    // Categorical: a level absent from the vocabulary matches no row.
    auto col = table.ColumnIndex(absl::StrCat(p.attribute, "=", p.value));
    for (std::size_t r = 0; r < table.n(); ++r) {
      const bool equal = col && table.matrix[r][*col] == 1.0;
      if (equal != want_equal) keep[r] = false;
    }
  }
  return keep;
}

absl::StatusOr<double> Pearson(std::span<const double> x,
                               std::span<const double> y, bool* constant) {
  if (x.size() != y.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "pearson: length mismatch ", x.size(), " vs ", y.size()));
  }
  if (x.size() < 2) {
    return absl::InvalidArgumentError("pearson: need at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (constant) *constant = (sxx == 0 || syy == 0);
  if (sxx == 0 || syy == 0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool QueryPlan::IsTied(std::string_view attribute) const {
  return std::find(tied.begin(), tied.end(), attribute) != tied.end();
}

absl::StatusOr<std::vector<double>> TargetEvent(const Query& query,
                                                const EncodedTable& table) {
  if (!query.target.empty()) {
    const auto cols = table.ColumnsOf(query.target);
    if (cols.size() != 1 || table.columns[cols[0]].level) {
      return absl::InvalidArgumentError(absl::StrCat(
          "target '", query.target, "' is not a numeric column"));
    }
    std::vector<double> out(table.n());
    for (std::size_t r = 0; r < table.n(); ++r) {
      out[r] = table.matrix[r][cols[0]];
    }
    return out;
  }
  ASSIGN_OR_RETURN(std::vector<bool> hit,
                   EvaluatePredicates(table, query.predicates));
  return std::vector<double>(hit.begin(), hit.end());
}

absl::StatusOr<QueryPlan> BuildPlan(const Query& query,
                                    const EncodedTable& table, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("correlation threshold ", theta, " outside (0, 1]"));
  }
  const Schema& schema = table.schema;
  ASSIGN_OR_RETURN(std::vector<std::string> selected,
                   SelectQueryAttributes(query, schema));
  ASSIGN_OR_RETURN(std::vector<double> target, TargetEvent(query, table));

  QueryPlan plan;
  plan.correlations.theta = theta;
  for (const std::string& name : selected) {
    if (name != schema.protected_name()) plan.c_attrs.push_back(name);
  }
  const std::set<std::string> c_set(plan.c_attrs.begin(), plan.c_attrs.end());

  const std::vector<std::string> attributes = schema.AttributeNames();
  std::vector<double> column(table.n());
  for (const std::string& attr : attributes) {
    double best = 0.0;
    bool all_constant = true;
    for (std::size_t col : table.ColumnsOf(attr)) {
      for (std::size_t r = 0; r < table.n(); ++r) {
        column[r] = table.matrix[r][col];
      }
      bool constant = false;
      ASSIGN_OR_RETURN(double r, Pearson(column, target, &constant));
      all_constant = all_constant && constant;
      if (std::abs(r) > std::abs(best)) best = r;
    }
    if (all_constant) {
      plan.correlations.warnings.push_back(absl::StrCat(
          "constant column: '", attr, "' has zero variance against target; r = 0"));
    }
    plan.correlations.entries[attr] = best;
  }

  std::set<std::string> tied(c_set);
  for (const std::string& attr : attributes) {
    if (c_set.count(attr)) continue;
    if (std::abs(plan.correlations.entries[attr]) > theta) {
      plan.d_attrs.push_back(attr);
      tied.insert(attr);
    }
  }
  for (const std::string& attr : attributes) {
    (tied.count(attr) ? plan.tied : plan.unrelated).push_back(attr);
  }
  if (plan.unrelated.empty()) {
    return absl::FailedPreconditionError(
        "nothing to shuffle: every attribute is tied to the query");
  }
  return plan;
}

absl::StatusOr<CorrelationMatrix> AttributeCorrelations(
    const EncodedTable& table) {
  CorrelationMatrix out;
  out.attributes = table.schema.AttributeNames();
  const std::size_t k = out.attributes.size();
  std::vector<std::vector<std::vector<double>>> columns(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t col : table.ColumnsOf(out.attributes[a])) {
      std::vector<double> values(table.n());
      for (std::size_t r = 0; r < table.n(); ++r) {
        values[r] = table.matrix[r][col];
      }
      columns[a].push_back(std::move(values));
    }
  }
  out.r.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double best = 0.0;
      for (const auto& x : columns[a]) {
        for (const auto& y : columns[b]) {
          ASSIGN_OR_RETURN(double r, Pearson(x, y));
          if (std::abs(r) > std::abs(best)) best = r;
        }
      }
      out.r[a][b] = out.r[b][a] = best;
    }
  }
  return out;
}

}  // namespace fairshuffle
