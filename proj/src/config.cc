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

#include "fairshuffle/config.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "fairshuffle/status_macros.h"

namespace fairshuffle {

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> out;
  for (absl::string_view piece : absl::StrSplit(text, sep)) {
    std::string item = Trim(std::string_view(piece.data(), piece.size()));
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

template <typename T>
absl::StatusOr<T> ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': '", text, "' is not a number"));
  }
  return value;
}

absl::StatusOr<bool> ParseBool(const std::string& key,
                               const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  return absl::InvalidArgumentError(
      absl::StrCat("config key '", key, "': expected true or false"));
}

absl::StatusOr<std::vector<int>> ParseIntList(const std::string& key,
                                              const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : SplitList(text, ',')) {
    ASSIGN_OR_RETURN(int v, ParseNumber<int>(key, item));
    out.push_back(v);
  }
  return out;
}

absl::StatusOr<Schema> ParseSchema(const std::string& text) {
  std::vector<Column> columns;
  for (const std::string& item : SplitList(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema entry '", item, "' is not of the form name:kind"));
    }
    auto kind = ParseColumnKind(Trim(std::string_view(item).substr(colon + 1)));
    if (!kind) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema entry '", item, "' has an unknown kind"));
    }
    columns.push_back({Trim(std::string_view(item).substr(0, colon)), *kind});
  }
  return Schema::Create(std::move(columns));
}

absl::StatusOr<QueryKind> ParseQueryKind(const std::string& text) {
  if (text == "count") return QueryKind::kCount;
  if (text == "decision") return QueryKind::kDecision;
  return absl::InvalidArgumentError(
      absl::StrCat("query.kind '", text, "' is neither count nor decision"));
}

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "seed",
      "input.path",
      "schema.columns",
      "synth.n",
      "synth.female_fraction",
      "synth.income_coef",
      "synth.area_coef",
      "synth.electricity_coef",
      "synth.maths_cutoff",
      "synth.income_cutoff",
      "query.kind",
      "query.predicates",
      "query.target",
      "report.queries",
      "report.horizon",
      "plan.theta",
      "fis.shufflers",
      "fis.batch_size",
      "fis.batch_counts",
      "fis.rounds",
      "fis.shuffle_tied",
      "fis.threads",
      "classify.label",
      "classify.learning_rate",
      "classify.iterations",
      "classify.validation_fraction",
      "riskmin.lambda",
      "riskmin.shufflers",
      "riskmin.batch_sizes",
      "output.dir",
  };
  return keys;
}

}  // namespace

absl::StatusOr<std::map<std::string, std::string>> ParseKeyValues(
    std::string_view text) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(
           absl::string_view(text.data(), text.size()), '\n')) {
    ++line_no;
    const std::string line = Trim(std::string_view(raw.data(), raw.size()));
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": expected key = value"));
    }
    std::string key = Trim(std::string_view(line).substr(0, eq));
    std::string value = Trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": empty key"));
    }
    if (!out.emplace(key, std::move(value)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, ": duplicate key '", key, "'"));
    }
  }
  return out;
}

absl::StatusOr<PipelineConfig> ParsePipelineConfig(
    std::string_view text, std::optional<std::uint64_t> seed_override) {
  ASSIGN_OR_RETURN(auto kv, ParseKeyValues(text));
  for (const auto& [key, unused] : kv) {
    if (!KnownKeys().count(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  auto get = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  PipelineConfig cfg;
  const std::string* seed = get("seed");
  if (seed_override) {
    cfg.seed = *seed_override;
  } else if (!seed) {
    return absl::InvalidArgumentError("config key 'seed' is mandatory");
  } else {
    ASSIGN_OR_RETURN(cfg.seed, ParseNumber<std::uint64_t>("seed", *seed));
  }

  if (const std::string* v = get("input.path")) cfg.input_path = *v;
  for (const auto& [key, unused] : kv) {
    if (cfg.input_path && key.rfind("synth.", 0) == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "'", key, "' given together with input.path; choose one source"));
    }
  }
  if (const std::string* v = get("synth.n")) {
    ASSIGN_OR_RETURN(cfg.synth.n, ParseNumber<int>("synth.n", *v));
  }
  struct {
    const char* key;
    double* field;
  } const synth_doubles[] = {
      {"synth.female_fraction", &cfg.synth.female_fraction},
      {"synth.income_coef", &cfg.synth.income_coef},
      {"synth.area_coef", &cfg.synth.area_coef},
      {"synth.electricity_coef", &cfg.synth.electricity_coef},
      {"synth.maths_cutoff", &cfg.synth.maths_cutoff},
      {"synth.income_cutoff", &cfg.synth.income_cutoff},
  };
  for (const auto& entry : synth_doubles) {
    if (const std::string* v = get(entry.key)) {
      ASSIGN_OR_RETURN(*entry.field, ParseNumber<double>(entry.key, *v));
    }
  }

  if (const std::string* v = get("schema.columns")) {
    ASSIGN_OR_RETURN(cfg.schema, ParseSchema(*v));
  } else if (cfg.input_path) {
    return absl::InvalidArgumentError(
        "schema.columns is required when reading input.path");
  } else {
    cfg.schema = AdmissionsSchema();
  }

  if (const std::string* v = get("query.kind")) {
    ASSIGN_OR_RETURN(cfg.query.kind, ParseQueryKind(*v));
  }
  if (const std::string* v = get("query.predicates")) {
    ASSIGN_OR_RETURN(cfg.query.predicates, ParsePredicates(*v));
  }
  if (const std::string* v = get("query.target")) cfg.query.target = *v;
  RETURN_IF_ERROR(ValidateQuery(cfg.query, cfg.schema));

  if (const std::string* v = get("report.queries")) {
    for (const std::string& text : SplitList(*v, ';')) {
      Query q;
      ASSIGN_OR_RETURN(q.predicates, ParsePredicates(text));
      RETURN_IF_ERROR(ValidateQuery(q, cfg.schema));
      cfg.report_queries.push_back(std::move(q));
    }
  }
  if (cfg.report_queries.empty()) {
    cfg.report_queries.push_back(Query{.predicates = cfg.query.predicates});
  }
  if (const std::string* v = get("report.horizon")) {
    ASSIGN_OR_RETURN(cfg.horizon, ParseNumber<int>("report.horizon", *v));
  }
  if (cfg.horizon < 1) {
    return absl::InvalidArgumentError("report.horizon must be at least 1");
  }
  if (const std::string* v = get("plan.theta")) {
    ASSIGN_OR_RETURN(cfg.theta, ParseNumber<double>("plan.theta", *v));
  }
  if (!(cfg.theta > 0 && cfg.theta <= 1)) {
    return absl::InvalidArgumentError("plan.theta must lie in (0, 1]");
  }

  cfg.fis.master_seed = cfg.seed;
  if (const std::string* v = get("fis.shufflers")) {
    ASSIGN_OR_RETURN(cfg.fis.S, ParseNumber<int>("fis.shufflers", *v));
  }
  if (const std::string* v = get("fis.batch_size")) {
    ASSIGN_OR_RETURN(cfg.fis.target_batch_size,
                     ParseNumber<int>("fis.batch_size", *v));
  }
  if (const std::string* v = get("fis.batch_counts")) {
    for (const std::string& item : SplitList(*v, ',')) {
      const auto colon = item.rfind(':');
      if (colon == std::string::npos) {
        return absl::InvalidArgumentError(absl::StrCat(
            "fis.batch_counts entry '", item, "' is not tag:count"));
      }
      ASSIGN_OR_RETURN(int count,
                       ParseNumber<int>("fis.batch_counts",
                                        Trim(std::string_view(item).substr(
                                            colon + 1))));
      cfg.fis.batch_counts[Trim(std::string_view(item).substr(0, colon))] =
          count;
    }
  }
  if (const std::string* v = get("fis.rounds")) {
    ASSIGN_OR_RETURN(cfg.fis.rounds, ParseNumber<int>("fis.rounds", *v));
  }
  if (const std::string* v = get("fis.shuffle_tied")) {
    ASSIGN_OR_RETURN(cfg.fis.shuffle_tied, ParseBool("fis.shuffle_tied", *v));
  }
  if (const std::string* v = get("fis.threads")) {
    ASSIGN_OR_RETURN(cfg.fis.threads, ParseNumber<int>("fis.threads", *v));
  }
  RETURN_IF_ERROR(ValidateFisConfig(cfg.fis));

  if (const std::string* v = get("classify.label")) {
    cfg.label = *v;
  } else if (cfg.query.kind == QueryKind::kDecision) {
    cfg.label = cfg.query.target;
  }
  if (!cfg.label.empty() &&
      cfg.schema.KindOf(cfg.label) != ColumnKind::kNumeric) {
    return absl::InvalidArgumentError(absl::StrCat(
        "classify.label '", cfg.label, "' is not a numeric schema column"));
  }
  if (const std::string* v = get("classify.learning_rate")) {
    ASSIGN_OR_RETURN(cfg.train.learning_rate,
                     ParseNumber<double>("classify.learning_rate", *v));
  }
  if (const std::string* v = get("classify.iterations")) {
    ASSIGN_OR_RETURN(cfg.train.iterations,
                     ParseNumber<int>("classify.iterations", *v));
  }
  if (const std::string* v = get("classify.validation_fraction")) {
    ASSIGN_OR_RETURN(cfg.validation_fraction,
                     ParseNumber<double>("classify.validation_fraction", *v));
  }
  if (!(cfg.validation_fraction > 0 && cfg.validation_fraction < 1)) {
    return absl::InvalidArgumentError(
        "classify.validation_fraction must lie in (0, 1)");
  }

  if (const std::string* v = get("riskmin.lambda")) {
    ASSIGN_OR_RETURN(cfg.lambda, ParseNumber<double>("riskmin.lambda", *v));
  }
  if (!(cfg.lambda >= 0)) {
    return absl::InvalidArgumentError("riskmin.lambda must be non-negative");
  }
  if (const std::string* v = get("riskmin.shufflers")) {
    ASSIGN_OR_RETURN(cfg.grid_shufflers,
                     ParseIntList("riskmin.shufflers", *v));
  }
  if (const std::string* v = get("riskmin.batch_sizes")) {
    ASSIGN_OR_RETURN(cfg.grid_batch_sizes,
                     ParseIntList("riskmin.batch_sizes", *v));
  }
  if (cfg.grid_shufflers.empty()) cfg.grid_shufflers = {cfg.fis.S};
  if (cfg.grid_batch_sizes.empty()) {
    cfg.grid_batch_sizes = {cfg.fis.target_batch_size};
  }

  if (const std::string* v = get("output.dir")) cfg.output_dir = *v;
  return cfg;
}

absl::StatusOr<PipelineConfig> LoadPipelineConfig(
    const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open config '", path, "'"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ASSIGN_OR_RETURN(PipelineConfig cfg,
                   ParsePipelineConfig(buffer.str(), seed_override));
  // A relative input path is taken relative to the config file.
  if (cfg.input_path && std::filesystem::path(*cfg.input_path).is_relative()) {
    cfg.input_path =
        (std::filesystem::path(path).parent_path() / *cfg.input_path).string();
  }
  return cfg;
}

}  // namespace fairshuffle
