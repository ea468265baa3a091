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

#ifndef FAIRSHUFFLE_REPORTS_H_
#define FAIRSHUFFLE_REPORTS_H_

#include <string>

#include "absl/status/statusor.h"
#include "fairshuffle/fairness.h"
#include "fairshuffle/fis.h"
#include "fairshuffle/partition.h"
#include "fairshuffle/privacy.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/riskmin.h"
#include "json.hpp"

namespace fairshuffle {

// JSON views of pipeline results. Objects are backed by std::map, so keys
// come out sorted and dumps are byte-stable.

nlohmann::json QueryToJson(const Query& query);
nlohmann::json CorrelationToJson(const CorrelationReport& report);
nlohmann::json PlanToJson(const Query& query, const QueryPlan& plan,
                          const BatchPlan& batches,
                          const AttributeGrouping& grouping);
nlohmann::json BudgetToJson(const PrivacyBudget& budget,
                            const std::vector<BatchTerm>& terms);
nlohmann::json CountToJson(const CountReport& report, const LossBound& bound,
                           double utility);
nlohmann::json RatesToJson(const RatesReport& report);
nlohmann::json DecisionsToJson(const DecisionReport& report,
                               const FairClassifier& classifier);
nlohmann::json RiskToJson(const RiskReport& report,
                          const HypothesisSpace& space);
nlohmann::json RrToJson(const RrEstimate& estimate);

nlohmann::json ModelToJson(const FairClassifier& model);
absl::StatusOr<FairClassifier> ModelFromJson(const nlohmann::json& json);

// Two-space indent plus a trailing newline.
std::string DumpJson(const nlohmann::json& json);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_REPORTS_H_
