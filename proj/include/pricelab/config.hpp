// Copyright 2026 The pricelab Authors
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


// JSON experiment and pretraining configs. Unknown keys are rejected and
// every spec re-serializes to one canonical form.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pricelab/engine.hpp"
#include "pricelab/qlearning.hpp"

namespace pricelab::config {

inline constexpr int kSchemaVersion = 1;

// `base_dir` resolves relative file paths (Q-tables, replay files).
engine::ExperimentSpec experiment_from_json(const nlohmann::json& j,
                                            const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const engine::ExperimentSpec& spec);
engine::ExperimentSpec load_experiment(const std::filesystem::path& file);

struct PretrainSpec {
  market::LogitMarketParams market;
  double alpha = 0.15;
  double beta = 0.004;
  double delta = 0.95;
  int grid_points = 15;
  double grid_margin = 0.1;
  qlearn::PretrainOptions options;
  std::filesystem::path output;  // Q-table file
};

PretrainSpec pretrain_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PretrainSpec& spec);
PretrainSpec load_pretrain(const std::filesystem::path& file);

llm::BackendConfig backend_from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = {});

// ConfigError naming the first remote backend whose API key variable is unset.
void check_secrets(const engine::ExperimentSpec& spec);

nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace pricelab::config
