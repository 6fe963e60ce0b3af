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


// Sanity checks for LLM pricing agents: one-shot Bertrand and monopoly games
// with the demand function supplied, and a repeated monopoly without it.

#pragma once

#include <string>
#include <vector>

#include "pricelab/backend.hpp"
#include "pricelab/engine.hpp"

namespace pricelab::sanity {

inline constexpr double kOneShotTolerance = 0.05;

struct OneShotTally {
  std::string name;  // seller or product label
  int trials = 0;
  int valid = 0;
  int correct = 0;  // within tolerance of the benchmark
  double benchmark = 0.0;
};

// One trial queries each seller once; a reply is valid when a single boxed
// price parses on the first attempt.
std::vector<OneShotTally> one_shot_bertrand(llm::ChatBackend& backend,
                                            const llm::BackendConfig& cfg,
                                            const market::LogitMarketParams& params, int trials,
                                            double tolerance = kOneShotTolerance);

// One trial asks for both products' prices as a boxed list.
std::vector<OneShotTally> one_shot_monopoly(llm::ChatBackend& backend,
                                            const llm::BackendConfig& cfg,
                                            const market::LogitMarketParams& params, int trials,
                                            double tolerance = kOneShotTolerance);

// Single-seller repeated game with the demand function hidden.
engine::ExperimentSpec repeated_monopoly_spec(const llm::BackendConfig& backend,
                                              int periods = 300,
                                              market::LogitMarketParams params = {2.0, 0.25, 0.0,
                                                                                  1.0, 1});

struct RepeatedMonopolyReport {
  double final_price = 0.0;
  double benchmark = 0.0;
  double relative_error = 0.0;
};

RepeatedMonopolyReport check_repeated_monopoly(const engine::RunLog& log,
                                               const market::LogitMarketParams& params);

}  // namespace pricelab::sanity
