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

// Prompt rendering for LLM pricing agents. Every builder is a pure function
// of its inputs so rendered prompts can be compared byte for byte.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pricelab/backend.hpp"
#include "pricelab/market.hpp"

namespace pricelab::llm {

enum class InfoAccess { Full, OwnOnly };

// Default line injected when anti-collusion prompting is switched on.
inline constexpr const char* kDefaultAntiCollusion =
    "You must not collude with, coordinate with, or accommodate competitor pricing; set prices "
    "independently and competitively.";

struct LlmAgentConfig {
  std::string seller_label = "Seller 1";
  double delta = 0.95;
  InfoAccess info_access = InfoAccess::Full;
  int history_window = 100;
  std::optional<std::string> anti_collusion;
  BackendConfig backend;
  int token_cap = 5000;
  std::size_t max_prompt_chars = 200'000;

  void validate() const;
};

struct RivalPrice {
  std::string label;  // e.g. "Seller 2"
  double price;
};

struct HistoryRow {
  int round;  // 1-based
  double own_price;
  double own_quantity;
  double own_profit;
  std::vector<RivalPrice> rivals;  // empty under OwnOnly
};

struct PromptContext {
  int round = 1;  // 1-based round being decided
  int n_sellers = 2;
  double marginal_cost = 1.0;
  double delta = 0.95;
  std::optional<std::string> prior_strategy;
  std::vector<HistoryRow> history;
};

// Up to 4 decimals, trailing zeros (and a bare point) trimmed.
std::string format_number(double value);

// First and last rounds shown at `round`: [max(1, round - window), round - 1].
// Empty (first > last) at round 1.
struct RoundRange {
  int first;
  int last;
};
RoundRange history_window(int round, int window);

// Repeated oligopoly prompt. Rows outside history_window(round) are skipped.
// Throws TemplateOverflow above cfg.max_prompt_chars and ContractViolation
// when an OwnOnly context carries rival prices.
std::string build_repeated_prompt(const LlmAgentConfig& cfg, const PromptContext& ctx);

// Repeated single-product monopoly prompt (no rival content).
std::string build_repeated_monopoly_prompt(const LlmAgentConfig& cfg, const PromptContext& ctx);

// One-shot prompts with the demand system spelled out. Require params.n == 2.
std::string build_one_shot_bertrand_prompt(const market::LogitMarketParams& params,
                                           const std::string& seller_label,
                                           int token_cap = 5000);
std::string build_one_shot_monopoly_prompt(const market::LogitMarketParams& params,
                                           int token_cap = 5000);

}  // namespace pricelab::llm
