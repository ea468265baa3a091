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

#ifndef FAIRSHUFFLE_PRIVACY_H_
#define FAIRSHUFFLE_PRIVACY_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairshuffle/fis.h"
#include "fairshuffle/partition.h"
#include "fairshuffle/queryplan.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

// Budget of iterative shuffling over t batches of about n1 rows with S
// shufflers: ln(t / (n1 - 1)^S). Small (including negative) values mean a
// stronger guarantee; the value is never clamped.
absl::StatusOr<double> EpsilonIs(std::int64_t t, std::int64_t n1, int S);

// One protected group's contribution: t_i batches of average size n_{it_i}.
struct BatchTerm {
  std::string tag;
  std::int64_t batches = 0;
  double batch_size = 0;
};

struct PrivacyBudget {
  double epsilon = 0;
  // tag -> t_i / (n_{it_i} - 1)^S
  std::map<std::string, double> per_tag_terms;
  int n_p = 0;
  int S = 0;
};

// Fair budget over n_p tagged groups:
//   epsilon = ln( (1 / n_p!) * sum_i t_i / (n_{it_i} - 1)^S )
// evaluated in log space. With one group it equals EpsilonIs.
absl::StatusOr<PrivacyBudget> EpsilonFair(const std::vector<BatchTerm>& terms,
                                          int S);

// (t_i, n_i / t_i) for every tag of a batch plan.
std::vector<BatchTerm> BatchTerms(const BatchPlan& plan);

struct CountReport {
  double c_true = 0;      // C_T
  double c_shuffled = 0;  // C_FS
  int horizon = 1;        // d
  Query query;
  std::vector<std::string> warnings;

  double average_true() const { return c_true / horizon; }
  double average_shuffled() const { return c_shuffled / horizon; }
};

// Counts rows satisfying the query predicates in each true and shuffled
// snapshot and sums over the horizon (one snapshot pair per time step).
// Predicates on unrelated attributes are allowed but flagged, since the
// bound then holds only as a diagnostic.
absl::StatusOr<CountReport> MakeCountReport(
    std::span<const EncodedTable> true_snapshots,
    std::span<const EncodedTable> shuffled_snapshots, const Query& query,
    const QueryPlan& plan);

// Static data: the same snapshot pair repeated for every step of a horizon
// of length d.
absl::StatusOr<CountReport> MakeCountReport(const EncodedTable& true_table,
                                            const ShuffledTable& shuffled,
                                            const Query& query,
                                            const QueryPlan& plan, int d = 1);

struct LossBound {
  double loss = 0;   // |C_T - C_FS|
  double bound = 0;  // C_FS * |e^epsilon - 1|
  bool satisfied = false;
};

LossBound ComputeLossBound(const CountReport& report,
                           const PrivacyBudget& budget);

// 1 - |C_T - C_FS| / max(C_T, C_FS, 1), in [0, 1]; exactly 1 at zero loss.
double Utility(const CountReport& report);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_PRIVACY_H_
