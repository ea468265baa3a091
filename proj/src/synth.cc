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

#include "fairshuffle/synth.h"

#include <cmath>
#include <cstdio>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "absl/strings/str_cat.h"
#include "fairshuffle/random.h"

namespace fairshuffle {

namespace {

// One decimal place; dividing the rounded integer keeps the value the nearest
// double to its decimal spelling.
double RoundTenth(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

Schema AdmissionsSchema() {
  return *Schema::Create({
      {"id", ColumnKind::kIdentifier},
      {"sex", ColumnKind::kProtected},
      {"age", ColumnKind::kNumeric},
      {"maths", ColumnKind::kNumeric},
      {"physics", ColumnKind::kNumeric},
      {"computer_science", ColumnKind::kNumeric},
      {"income", ColumnKind::kNumeric},
      {"living_area", ColumnKind::kCategorical},
      {"electricity", ColumnKind::kCategorical},
      {"religion", ColumnKind::kCategorical},
      {"eligible", ColumnKind::kNumeric},
  });
}

absl::StatusOr<Table> SynthGenerate(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n < 4) {
    return absl::InvalidArgumentError(
        absl::StrCat("synthetic table needs n >= 4, got ", spec.n));
  }
  if (!(spec.female_fraction > 0 && spec.female_fraction < 1)) {
    return absl::InvalidArgumentError("female fraction must lie in (0, 1)");
  }
  const double explained = spec.income_coef * spec.income_coef +
                           spec.area_coef * spec.area_coef +
                           spec.electricity_coef * spec.electricity_coef;
  if (explained > 1.0) {
    return absl::InvalidArgumentError(
        "maths coefficients explain more than unit variance");
  }
  const double noise_coef = std::sqrt(1.0 - explained);

  Rng rng(DeriveSeed(seed, SeedDomain::kSynth, {}));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  boost::random::bernoulli_distribution<double> female(spec.female_fraction);
  boost::random::bernoulli_distribution<double> coin(0.5);
  static const char* kReligions[] = {"Christian", "Hindu", "Muslim"};

  const int width = static_cast<int>(std::to_string(spec.n).size());
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "u%0*d", width, i + 1);
    const bool is_female = female(rng);
    const double age = 17.0 + static_cast<double>(UniformIndex(rng, 4));
    const double income_z = normal(rng);
    const bool urban = coin(rng);
    const bool power = coin(rng);
    const double z = spec.income_coef * income_z +
                     spec.area_coef * (urban ? 1.0 : -1.0) +
                     spec.electricity_coef * (power ? 1.0 : -1.0) +
                     noise_coef * normal(rng);
    const double maths = RoundTenth(60.0 + 12.0 * z);
    const double physics = RoundTenth(60.0 + 12.0 * normal(rng));
    const double cs = RoundTenth(60.0 + 12.0 * normal(rng));
    const double income = std::round(40000.0 + 10000.0 * income_z);
    const char* religion = kReligions[UniformIndex(rng, 3)];
    const double eligible =
        (maths >= spec.maths_cutoff && income >= spec.income_cutoff) ? 1.0
                                                                      : 0.0;
    rows.push_back(Row{std::string(id), std::string(is_female ? "F" : "M"),
                       age, maths, physics, cs, income,
                       std::string(urban ? "urban" : "rural"),
                       std::string(power ? "yes" : "no"),
                       std::string(religion), eligible});
  }
  return Table::Create(AdmissionsSchema(), std::move(rows));
}

}  // namespace fairshuffle
