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

#include "pricelab/llm_agent.hpp"

#include "pricelab/errors.hpp"

namespace pricelab::llm {

QueryResult query(ChatBackend& backend, const BackendConfig& cfg, const std::string& prompt,
                  int max_tokens, std::optional<int> expected_round) {
  cfg.validate();
  QueryResult result;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    ChatRequest request{attempt == 0 ? prompt : prompt + "\n\n" + kFormatReminder, max_tokens,
                        cfg.temperature};
    result.attempts = attempt + 1;
    try {
      result.text = backend.complete(request);
      result.transcript.push_back(result.text);
      result.parsed = parse_response(result.text, expected_round);
      return result;
    } catch (const MalformedResponse& e) {
      last_error = e.what();
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw AgentFailure("no usable reply after " + std::to_string(result.attempts) +
                     " attempts: " + last_error);
}

LlmAgent::LlmAgent(LlmAgentConfig cfg, std::shared_ptr<ChatBackend> backend, PromptStyle style)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), style_(style) {
  cfg_.validate();
  if (!backend_) throw ContractViolation("LLM agent needs a backend");
}

PromptContext LlmAgent::context(const std::vector<HistoryRow>& history, int round, int n_sellers,
                                double marginal_cost) const {
  PromptContext ctx;
  ctx.round = round;
  ctx.n_sellers = n_sellers;
  ctx.marginal_cost = marginal_cost;
  ctx.delta = cfg_.delta;
  ctx.prior_strategy = prior_strategy_;
  const RoundRange shown = history_window(round, cfg_.history_window);
  for (const auto& row : history) {
    if (row.round < shown.first || row.round > shown.last) continue;
    ctx.history.push_back(row);
    if (cfg_.info_access == InfoAccess::OwnOnly) ctx.history.back().rivals.clear();
  }
  return ctx;
}

LlmDecision LlmAgent::decide_price(const std::vector<HistoryRow>& history, int round,
                                   int n_sellers, double marginal_cost) {
  const PromptContext ctx = context(history, round, n_sellers, marginal_cost);
  LlmDecision decision;
  decision.prompt = style_ == PromptStyle::Monopoly ? build_repeated_monopoly_prompt(cfg_, ctx)
                                                    : build_repeated_prompt(cfg_, ctx);
  QueryResult reply = query(*backend_, cfg_.backend, decision.prompt, cfg_.token_cap, round);
  decision.price = reply.parsed.price;
  decision.attempts = reply.attempts;
  decision.transcript = std::move(reply.transcript);
  if (!reply.parsed.strategy.empty()) prior_strategy_ = reply.parsed.strategy;
  decision.parsed = std::move(reply.parsed);
  return decision;
}

}  // namespace pricelab::llm
