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

#include "fairshuffle/riskmin.h"

#include <numeric>

#include "absl/strings/str_cat.h"

namespace fairshuffle {

absl::StatusOr<double> EmpiricalRisk(std::span<const double> losses) {
  if (losses.empty()) {
    return absl::InvalidArgumentError("empirical risk of an empty loss list");
  }
  for (double l : losses) {
    if (!(l >= 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("loss ", l, " is negative or NaN"));
    }
  }
  return std::accumulate(losses.begin(), losses.end(), 0.0) /
         static_cast<double>(losses.size());
}

double Penalty(int S, std::size_t total_batches) {
  return static_cast<double>(S) * static_cast<double>(total_batches);
}

double RegularizedRisk(double empirical_risk, int S,
                       std::size_t total_batches, double lambda) {
  return empirical_risk + lambda * Penalty(S, total_batches);
}

absl::StatusOr<RiskReport> Minimize(const HypothesisSpace& space,
                                    const CandidateEvaluator& evaluate) {
  if (space.candidates.empty()) {
    return absl::InvalidArgumentError("hypothesis space is empty");
  }
  if (!(space.lambda >= 0)) {
    return absl::InvalidArgumentError("lambda must be non-negative");
  }
  RiskReport report;
  report.lambda = space.lambda;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < space.candidates.size(); ++i) {
    const FisConfig& config = space.candidates[i];
    CandidateRisk risk;
    absl::StatusOr<CandidateOutcome> outcome = evaluate(config);
    absl::StatusOr<double> er =
        outcome.ok() ? EmpiricalRisk(outcome->losses) : outcome.status();
    if (!er.ok()) {
      risk.error = std::string(er.status().message());
      report.candidates.push_back(std::move(risk));
      continue;
    }
    risk.feasible = true;
    risk.empirical_risk = *er;
    risk.penalty = Penalty(config.S, outcome->total_batches);
    risk.regularized_risk = risk.empirical_risk + space.lambda * risk.penalty;
    risk.epsilon = outcome->epsilon;
    if (!best ||
        risk.regularized_risk < report.candidates[*best].regularized_risk) {
      best = i;
    }
    report.candidates.push_back(std::move(risk));
  }
  if (!best) {
    return absl::FailedPreconditionError(
        "every candidate configuration is infeasible");
  }
  report.chosen = *best;
  return report;
}

}  // namespace fairshuffle
