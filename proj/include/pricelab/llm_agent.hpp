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

// LLM-backed pricing agent: prompt, query with bounded retries, parse.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pricelab/backend.hpp"
#include "pricelab/prompts.hpp"
#include "pricelab/response.hpp"

namespace pricelab::llm {

inline constexpr const char* kFormatReminder =
    "Your previous reply could not be parsed. Reply again following the exact format above, "
    "with your price inside \\boxed{}.";

struct QueryResult {
  std::string text;                     // reply that parsed
  std::vector<std::string> transcript;  // every reply received, in order
  ParsedResponse parsed;
  int attempts = 0;
};

// At most 1 + max_retries calls. Malformed replies and transport errors are
// retried with the format reminder appended; exhaustion throws AgentFailure.
QueryResult query(ChatBackend& backend, const BackendConfig& cfg, const std::string& prompt,
                  int max_tokens, std::optional<int> expected_round = std::nullopt);

enum class PromptStyle { Oligopoly, Monopoly };

struct LlmDecision {
  double price = 0.0;
  ParsedResponse parsed;
  std::string prompt;
  std::vector<std::string> transcript;
  int attempts = 0;
};

class LlmAgent {
 public:
  LlmAgent(LlmAgentConfig cfg, std::shared_ptr<ChatBackend> backend,
           PromptStyle style = PromptStyle::Oligopoly);

  // history: rows visible to this agent (rival prices only under Full).
  LlmDecision decide_price(const std::vector<HistoryRow>& history, int round, int n_sellers,
                           double marginal_cost);

  // Context the next decision would render (exposed for audits).
  PromptContext context(const std::vector<HistoryRow>& history, int round, int n_sellers,
                        double marginal_cost) const;

  const LlmAgentConfig& config() const { return cfg_; }
  const std::optional<std::string>& prior_strategy() const { return prior_strategy_; }

 private:
  LlmAgentConfig cfg_;
  std::shared_ptr<ChatBackend> backend_;
  PromptStyle style_;
  std::optional<std::string> prior_strategy_;
};

}  // namespace pricelab::llm
