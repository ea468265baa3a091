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

#ifndef FAIRSHUFFLE_SYNTH_H_
#define FAIRSHUFFLE_SYNTH_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "fairshuffle/tabular.h"

namespace fairshuffle {

// Synthetic admissions records. The maths score is a standardized mix
//
//   z = income_coef * income_z + area_coef * urban + electricity_coef * power
//       + sqrt(1 - sum of squared coefficients) * noise
//
// (urban, power in {-1, +1}; everything independent, unit variance), so
// corr(income, maths) is income_coef before rounding. maths = 60 + 12 z,
// income = 40000 + 10000 income_z. Physics, computer science, age and
// religion are independent noise. The label "eligible" is
// maths >= maths_cutoff && income >= income_cutoff, regardless of sex.
struct SynthSpec {
  int n = 2000;
  double female_fraction = 0.5;
  double income_coef = 0.8;
  double area_coef = 0.25;
  double electricity_coef = 0.25;
  double maths_cutoff = 60;
  double income_cutoff = 40000;
};

// id, sex (protected, "F"/"M"), age, maths, physics, computer_science,
// income, living_area, electricity, religion, eligible.
Schema AdmissionsSchema();

absl::StatusOr<Table> SynthGenerate(const SynthSpec& spec, std::uint64_t seed);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_SYNTH_H_
