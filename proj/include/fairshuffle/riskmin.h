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

#ifndef FAIRSHUFFLE_RISKMIN_H_
#define FAIRSHUFFLE_RISKMIN_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/fis.h"

namespace fairshuffle {

struct HypothesisSpace {
  std::vector<FisConfig> candidates;
  double lambda = 0;
};

// Mean of per-query count losses |C_Ti - C_FSi|.
absl::StatusOr<double> EmpiricalRisk(std::span<const double> losses);

// Complexity penalty G = S * sum_i t_i.
double Penalty(int S, std::size_t total_batches);

// er + lambda * G.
double RegularizedRisk(double empirical_risk, int S,
                       std::size_t total_batches, double lambda);

// What one end-to-end evaluation of a candidate produced.
struct CandidateOutcome {
  std::vector<double> losses;
  double epsilon = 0;
  std::size_t total_batches = 0;  // sum_i t_i after resolving defaults
};

using CandidateEvaluator =
    std::function<absl::StatusOr<CandidateOutcome>(const FisConfig&)>;

struct CandidateRisk {
  bool feasible = false;
  std::string error;  // why the candidate was excluded
  double empirical_risk = 0;
  double penalty = 0;
  double regularized_risk = 0;
  double epsilon = 0;
};

struct RiskReport {
  std::vector<CandidateRisk> candidates;
  std::size_t chosen = 0;
  double lambda = 0;
};

// Evaluates every candidate and returns the argmin of regularized risk
// (lowest index on ties). Candidates whose evaluation fails are marked
// infeasible; if none is feasible the call fails.
absl::StatusOr<RiskReport> Minimize(const HypothesisSpace& space,
                                    const CandidateEvaluator& evaluate);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_RISKMIN_H_
