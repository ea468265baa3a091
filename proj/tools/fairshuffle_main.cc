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

// Batch driver: fairshuffle [STAGE] --config PATH [--seed N] [--out DIR]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairshuffle/config.h"
#include "fairshuffle/pipeline.h"

namespace {

constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairly iterative shuffling pipeline"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string stage_flag;
  std::string stage_positional;
  app.add_option("--config", config_path, "Pipeline config file")
      ->required();
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--stage", stage_flag,
                 "synth, plan, shuffle, budget, report, classify, riskmin or "
                 "run");
  app.add_option("STAGE", stage_positional, "Stage, as an alternative to "
                                            "--stage");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (!stage_flag.empty() && !stage_positional.empty() &&
      stage_flag != stage_positional) {
    std::cerr << "error: conflicting stages '" << stage_flag << "' and '"
              << stage_positional << "'\n";
    return kConfigError;
  }
  std::string stage_name = !stage_flag.empty()       ? stage_flag
                           : !stage_positional.empty() ? stage_positional
                                                       : "run";
  const auto stage = fairshuffle::ParseStage(stage_name);
  if (!stage) {
    std::cerr << "error: unknown stage '" << stage_name << "'\n";
    return kConfigError;
  }

  auto config = fairshuffle::LoadPipelineConfig(config_path, seed);
  if (!config.ok()) {
    std::cerr << "config error: " << config.status().message() << "\n";
    return kConfigError;
  }
  if (out_dir) config->output_dir = *out_dir;

  const absl::Status status = fairshuffle::RunPipeline(*config, *stage);
  if (!status.ok()) {
    std::cerr << "stage '" << stage_name
              << "' failed: " << status.message() << "\n";
    return kStageFailure;
  }
  return 0;
}
