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

#include "pricelab/sanity.hpp"

#include <cmath>

#include "pricelab/equilibrium.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/prompts.hpp"
#include "pricelab/response.hpp"

namespace pricelab::sanity {
namespace {

bool near(double price, double target, double tolerance) {
  return std::abs(price - target) <= tolerance * target;
}

std::string ask(llm::ChatBackend& backend, const llm::BackendConfig& cfg, const std::string& prompt) {
  return backend.complete({prompt, 5000, cfg.temperature});
}

}  // namespace

std::vector<OneShotTally> one_shot_bertrand(llm::ChatBackend& backend, const llm::BackendConfig& cfg,
                                            const market::LogitMarketParams& params, int trials,
                                            double tolerance) {
  if (params.n != 2) throw ContractViolation("one-shot Bertrand check needs two sellers");
  const double nash = equilibrium::nash_logit(params).price;
  std::vector<OneShotTally> tallies;
  for (int i = 0; i < 2; ++i)
    tallies.push_back({"Seller " + std::to_string(i + 1), trials, 0, 0, nash});
  for (int trial = 0; trial < trials; ++trial) {
    for (auto& tally : tallies) {
      try {
        const auto parsed =
            llm::parse_response(ask(backend, cfg, llm::build_one_shot_bertrand_prompt(params, tally.name)));
        if (parsed.is_list) continue;
        ++tally.valid;
        if (near(parsed.price, nash, tolerance)) ++tally.correct;
      } catch (const MalformedResponse&) {
      } catch (const TransportError&) {
      }
    }
  }
  return tallies;
}

std::vector<OneShotTally> one_shot_monopoly(llm::ChatBackend& backend, const llm::BackendConfig& cfg,
                                            const market::LogitMarketParams& params, int trials,
                                            double tolerance) {
  if (params.n != 2) throw ContractViolation("one-shot monopoly check prices two products");
  const double target = equilibrium::monopoly_logit(params).price;
  std::vector<OneShotTally> tallies;
  for (int i = 0; i < 2; ++i)
    tallies.push_back({"Product " + std::to_string(i + 1), trials, 0, 0, target});
  const std::string prompt = llm::build_one_shot_monopoly_prompt(params);
  for (int trial = 0; trial < trials; ++trial) {
    try {
      const auto parsed = llm::parse_response(ask(backend, cfg, prompt));
      if (!parsed.is_list || parsed.prices.size() != 2) continue;
      for (int i = 0; i < 2; ++i) {
        ++tallies[i].valid;
        if (near(parsed.prices[i], target, tolerance)) ++tallies[i].correct;
      }
    } catch (const MalformedResponse&) {
    } catch (const TransportError&) {
    }
  }
  return tallies;
}

engine::ExperimentSpec repeated_monopoly_spec(const llm::BackendConfig& backend, int periods,
                                              market::LogitMarketParams params) {
  if (params.n != 1) throw ContractViolation("repeated monopoly runs a single seller");
  engine::ExperimentSpec spec;
  spec.condition = "repeated-monopoly";
  spec.market = params;
  spec.max_periods = periods;
  spec.stop_on_convergence = false;
  engine::LlmAgentSpec agent;
  agent.config.seller_label = "Monopolist";
  agent.config.backend = backend;
  spec.agents.push_back({"Monopolist", agent});
  return spec;
}

RepeatedMonopolyReport check_repeated_monopoly(const engine::RunLog& log,
                                               const market::LogitMarketParams& params) {
  if (log.periods.empty()) throw ContractViolation("empty run log");
  RepeatedMonopolyReport report;
  report.final_price = log.periods.back().prices.front();
  report.benchmark = equilibrium::monopoly_logit(params).price;
  report.relative_error = (report.final_price - report.benchmark) / report.benchmark;
  return report;
}

}  // namespace pricelab::sanity
