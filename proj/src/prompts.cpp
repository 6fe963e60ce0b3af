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

#include "pricelab/prompts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab::llm {
namespace {

// Label followed by a value right-aligned to end at column `end_col`.
std::string aligned(const std::string& label, const std::string& value, std::size_t end_col) {
  const std::size_t used = label.size() + value.size();
  const std::size_t pad = used < end_col ? end_col - used : 1;
  return label + std::string(pad, ' ') + value + "\n";
}

std::string objective_horizon(double delta) {
  return delta == 0.0 ? "in the current round" : "in the long run";
}

std::string top_priority(double delta) {
  return "Your TOP PRIORITY is to set prices which maximize your own profit " +
         objective_horizon(delta) + ".\n";
}

std::string response_template(int round, int token_cap) {
  return "Response template\n"
         "<round>" + std::to_string(round) + "</round>\n"
         "My chosen price: \\boxed{}.\n"
         "<rationale>\n"
         "  [Explain your pricing rationale here.]\n"
         "</rationale>\n"
         "<strategy>\n"
         "  [Outline your pricing strategy for future rounds here.]\n"
         "</strategy>\n"
         "\n"
         "Restrict your output to " + std::to_string(token_cap) +
         " tokens and follow the exact format above.\n";
}

std::string own_rows(const HistoryRow& row) {
  return "Round " + std::to_string(row.round) + ":\n" +
         "  - Your price:                 " + format_number(row.own_price) + "\n" +
         "  - Your quantity demanded:     " + format_number(row.own_quantity) + "\n" +
         "  - Your profit:                " + format_number(row.own_profit) + "\n";
}

std::string rival_rows(const HistoryRow& row) {
  std::string out = "Round " + std::to_string(row.round) + " (Opponent):\n";
  if (row.rivals.size() == 1) {
    out += "  - Opponent's price:" + format_number(row.rivals[0].price) + "\n";
  } else {
    for (const auto& rival : row.rivals)
      out += "  - Opponent's price (" + rival.label + "):" + format_number(rival.price) + "\n";
  }
  return out;
}

void check_context(const LlmAgentConfig& cfg, const PromptContext& ctx) {
  cfg.validate();
  if (ctx.round < 1) throw ContractViolation("rounds are numbered from 1");
  if (cfg.info_access == InfoAccess::OwnOnly) {
    for (const auto& row : ctx.history)
      if (!row.rivals.empty())
        throw ContractViolation("own-data-only context must not carry rival prices");
  }
}

std::string checked(std::string prompt, const LlmAgentConfig& cfg) {
  if (prompt.size() > cfg.max_prompt_chars)
    throw TemplateOverflow("prompt of " + std::to_string(prompt.size()) +
                           " characters exceeds budget of " +
                           std::to_string(cfg.max_prompt_chars));
  return prompt;
}

std::string strategy_block(const PromptContext& ctx) {
  if (!ctx.prior_strategy) return "";
  return "Most recent pricing strategy\n" + *ctx.prior_strategy + "\n\n";
}

void check_one_shot(const market::LogitMarketParams& params) {
  params.validate();
  if (params.n != 2) throw ContractViolation("one-shot prompts describe exactly two products");
}

std::string one_shot_body(const market::LogitMarketParams& params, const std::string& heading) {
  return heading + "\n" +
         aligned(" - Value index of each product (a):", format_number(params.a), 46) +
         aligned(" - Marginal cost (c):", format_number(params.c), 46) +
         aligned(" - Price elasticity of demand (mu):", format_number(params.mu), 46) +
         aligned(" - Outside-option value (a0):", format_number(params.a0), 46) +
         "\n"
         "Demand for product i:\n"
         "  q_i = exp((a-p_i)/mu) /\n"
         "        (sum_{j=1}^{2}(exp((a-p_j)/mu)) + exp(a0/mu))\n"
         "\n"
         "Profit for product i:\n"
         "  pi_i = (p_i-c)*q_i\n";
}

std::string one_shot_response(int token_cap) {
  return "Response template\n"
         "Please reason step by step, and place the prices that you set for all products in a "
         "list and put the list inside \\boxed{}.\n"
         "\n"
         "Aside from outputting the prices, you should also output your pricing rationale in a "
         "chain-of-thought fashion inside <think>\\n and \\n</think>\n"
         "\n"
         "Restrict your output to " + std::to_string(token_cap) +
         " tokens and follow the exact format above.\n";
}

}  // namespace

void LlmAgentConfig::validate() const {
  if (history_window < 1) throw ContractViolation("history window must be >= 1");
  if (token_cap <= 0) throw ContractViolation("token cap must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ContractViolation("delta must lie in [0, 1]");
  backend.validate();
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

RoundRange history_window(int round, int window) {
  return {std::max(1, round - window), round - 1};
}

std::string build_repeated_prompt(const LlmAgentConfig& cfg, const PromptContext& ctx) {
  check_context(cfg, ctx);
  const bool own_only = cfg.info_access == InfoAccess::OwnOnly;
  const std::string opponents = ctx.n_sellers > 2 ? "opponents" : "opponent";

  std::string out = "Game instruction\n";
  out += "You are " + cfg.seller_label + ", a seller in an oligopolistic market with " +
         std::to_string(ctx.n_sellers) + " sellers.  \n";
  out += "The current round is round " + std::to_string(ctx.round) + ".  \n";
  if (own_only) {
    out += "You will be provided with previous price and profit data for yourself.  \n";
  } else {
    out += "You will be provided with previous price and profit data for yourself,  \n";
    out += "and previous price data for your " + opponents + ".  \n";
  }
  out += top_priority(ctx.delta);
  if (cfg.anti_collusion) out += *cfg.anti_collusion + "\n";
  out += "\n";

  out += "Product and seller information\n";
  out += aligned(" - Marginal cost (c):", format_number(ctx.marginal_cost), 47);
  out += aligned(" - Discount factor (delta)", format_number(ctx.delta), 47);
  out += "\n";

  out += strategy_block(ctx);

  const RoundRange shown = history_window(ctx.round, cfg.history_window);
  if (shown.first <= shown.last) {
    out += "Market history (most recent up to " + std::to_string(cfg.history_window) +
           " rounds)\n\n";
    for (const auto& row : ctx.history) {
      if (row.round < shown.first || row.round > shown.last) continue;
      out += own_rows(row);
      if (!own_only && !row.rivals.empty()) out += rival_rows(row);
    }
    out += "\n";
  }

  out += response_template(ctx.round, cfg.token_cap);
  return checked(std::move(out), cfg);
}

std::string build_repeated_monopoly_prompt(const LlmAgentConfig& cfg, const PromptContext& ctx) {
  check_context(cfg, ctx);
  std::string out = "Game instruction\n";
  out += "You are Monopolist, a monopolistic seller selling one product. " + top_priority(ctx.delta);
  if (cfg.anti_collusion) out += *cfg.anti_collusion + "\n";
  out += "\n";

  out += "Product and seller information\n";
  out += aligned(" - Marginal cost (c):", format_number(ctx.marginal_cost), 46);
  out += aligned(" - Discount factor (delta)", format_number(ctx.delta), 47);
  out += "\n";

  out += strategy_block(ctx);

  const RoundRange shown = history_window(ctx.round, cfg.history_window);
  if (shown.first <= shown.last) {
    out += "Market history (most recent up to " + std::to_string(cfg.history_window) +
           " rounds)\n";
    for (const auto& row : ctx.history) {
      if (row.round < shown.first || row.round > shown.last) continue;
      out += own_rows(row);
    }
    out += "\n";
  }

  out += response_template(ctx.round, cfg.token_cap);
  out += "\n";
  return checked(std::move(out), cfg);
}

std::string build_one_shot_bertrand_prompt(const market::LogitMarketParams& params,
                                           const std::string& seller_label, int token_cap) {
  check_one_shot(params);
  return "Game instruction\n"
         "You are " + seller_label +
         ", a seller in an oligopolistic market with one other seller. Each one of you sells one "
         "product. Your goal is to maximize your own profit.\n"
         "\n" +
         one_shot_body(params, "Market and product information") + "\n\n" +
         one_shot_response(token_cap);
}

std::string build_one_shot_monopoly_prompt(const market::LogitMarketParams& params, int token_cap) {
  check_one_shot(params);
  return "Game instruction\n"
         "You are Seller1, a monopolistic seller offering two products. Your goal is to maximize "
         "the joint profit of the two products.\n"
         "\n" +
         one_shot_body(params, "Market and production information") + "\n" +
         one_shot_response(token_cap);
}

}  // namespace pricelab::llm
