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

#include "pricelab/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>

#include "pricelab/errors.hpp"
#include "pricelab/run_io.hpp"

namespace pricelab::engine {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t agent_seed(std::uint64_t seed, int self) {
  return splitmix64(seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(self + 1)));
}

class LlmPricingAgent final : public PricingAgent {
 public:
  LlmPricingAgent(llm::LlmAgent agent, std::vector<std::string> labels, int n, double cost)
      : agent_(std::move(agent)), labels_(std::move(labels)), n_(n), cost_(cost) {}

  AgentAction decide(const AgentView& view) override {
    const int round = static_cast<int>(view.t()) + 1;
    const auto shown = llm::history_window(round, agent_.config().history_window);
    std::vector<llm::HistoryRow> rows;
    for (int r = shown.first; r <= shown.last; ++r) {
      const auto k = static_cast<std::size_t>(r - 1);
      llm::HistoryRow row{r, view.own_price(k), view.own_quantity(k), view.own_profit(k), {}};
      if (view.access() == llm::InfoAccess::Full) {
        for (int j = 0; j < n_; ++j)
          if (j != view.self()) row.rivals.push_back({labels_[j], view.price_of(k, j)});
      }
      rows.push_back(std::move(row));
    }
    const auto start = std::chrono::steady_clock::now();
    llm::LlmDecision decision = agent_.decide_price(rows, round, n_, cost_);
    AgentAction action;
    action.price = decision.price;
    action.output.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    action.output.prompt = std::move(decision.prompt);
    action.output.responses = std::move(decision.transcript);
    action.output.attempts = decision.attempts;
    action.output.warnings = std::move(decision.parsed.warnings);
    return action;
  }

 private:
  llm::LlmAgent agent_;
  std::vector<std::string> labels_;
  int n_;
  double cost_;
};

class QPricingAgent final : public PricingAgent {
 public:
  explicit QPricingAgent(qlearn::QAgent agent) : agent_(std::move(agent)) {}

  AgentAction decide(const AgentView&) override { return {agent_.decide(), {}}; }

  void observe(const PeriodRecord& record, int self) override {
    agent_.learn(record.prices[self], record.prices[1 - self], record.profits[self]);
  }

 private:
  qlearn::QAgent agent_;
};

class GrimPricingAgent final : public PricingAgent {
 public:
  explicit GrimPricingAgent(rules::GrimTriggerAgent agent) : agent_(std::move(agent)) {}

  AgentAction decide(const AgentView& view) override {
    std::span<const double> last;
    if (view.t() > 0) last = view.prices(static_cast<std::size_t>(view.t() - 1));
    return {agent_.act(view.t(), last, view.self()), {}};
  }

 private:
  rules::GrimTriggerAgent agent_;
};

class ConstantAgent final : public PricingAgent {
 public:
  explicit ConstantAgent(double price) : price_(price) {}
  AgentAction decide(const AgentView&) override { return {price_, {}}; }

 private:
  double price_;
};

class ScriptedPricingAgent final : public PricingAgent {
 public:
  explicit ScriptedPricingAgent(rules::ScriptedAgent script) : script_(std::move(script)) {}
  AgentAction decide(const AgentView& view) override {
    return {rules::scripted_act(script_, view.t()), {}};
  }

 private:
  rules::ScriptedAgent script_;
};

}  // namespace

void ConvergenceRule::validate() const {
  if (window < 1) throw ContractViolation("convergence window must be >= 1");
  if (!(band > 0.0)) throw ContractViolation("convergence band must be positive");
}

llm::InfoAccess AgentSpec::info_access() const {
  if (const auto* llm_spec = std::get_if<LlmAgentSpec>(&kind)) return llm_spec->config.info_access;
  return llm::InfoAccess::Full;
}

std::string AgentSpec::family() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LlmAgentSpec>) return "llm";
        if constexpr (std::is_same_v<T, QAgentSpec>) return "q_learning";
        if constexpr (std::is_same_v<T, GrimTriggerSpec>) return "grim_trigger";
        if constexpr (std::is_same_v<T, ConstantSpec>) return "constant";
        return "scripted";
      },
      kind);
}

void ExperimentSpec::validate() const {
  market.validate();
  convergence.validate();
  if (agents.size() != static_cast<std::size_t>(market.n))
    throw ConfigError("roster has " + std::to_string(agents.size()) + " agents but the market has " +
                      std::to_string(market.n) + " sellers");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (max_periods < 1) throw ConfigError("max_periods must be >= 1");
  for (const auto& agent : agents) {
    if (std::holds_alternative<QAgentSpec>(agent.kind) && market.n != 2)
      throw ConfigError("Q-learning agents require a two-seller market");
    if (const auto* llm_spec = std::get_if<LlmAgentSpec>(&agent.kind)) llm_spec->config.validate();
    if (const auto* grim = std::get_if<GrimTriggerSpec>(&agent.kind)) grim->config.validate();
    if (const auto* scripted = std::get_if<ScriptedSpec>(&agent.kind)) scripted->script.validate();
    if (const auto* constant = std::get_if<ConstantSpec>(&agent.kind)) {
      if (!(std::isfinite(constant->price) && constant->price >= 0.0))
        throw ConfigError("constant price must be finite and nonnegative");
    }
  }
}

double AgentView::price_of(std::size_t k, int seller) const {
  if (seller != self_ && access_ == llm::InfoAccess::OwnOnly)
    throw ContractViolation("rival prices are hidden from own-data-only agents");
  return history_[k].prices[seller];
}

std::span<const double> AgentView::prices(std::size_t k) const {
  if (access_ == llm::InfoAccess::OwnOnly)
    throw ContractViolation("rival prices are hidden from own-data-only agents");
  return history_[k].prices;
}

std::uint64_t run_seed(std::uint64_t base_seed, int run_index) {
  return splitmix64(base_seed + 0x632BE59BD9B4E019ULL * static_cast<std::uint64_t>(run_index));
}

std::vector<std::unique_ptr<PricingAgent>> make_agents(const RunContext& ctx) {
  const ExperimentSpec& spec = *ctx.spec;
  const int n = static_cast<int>(spec.agents.size());
  std::vector<std::string> labels;
  for (const auto& agent : spec.agents) labels.push_back(agent.label);

  // Probability that seller j's deviation is caught by some grim-trigger rival.
  std::vector<double> detect(n, 0.0);
  bool any_public = false;
  for (int g = 0; g < n; ++g) {
    const auto* grim = std::get_if<GrimTriggerSpec>(&spec.agents[g].kind);
    if (!grim) continue;
    any_public = any_public || grim->public_signal;
    for (int j = 0; j < n; ++j)
      if (j != g) detect[j] = std::max(detect[j], grim->config.rho_detect);
  }
  std::shared_ptr<rules::PublicSignal> signal;
  if (any_public) signal = std::make_shared<rules::PublicSignal>(agent_seed(ctx.run_seed, -1));

  std::vector<std::unique_ptr<PricingAgent>> agents;
  for (int i = 0; i < n; ++i) {
    const AgentSpec& agent = spec.agents[i];
    const std::uint64_t seed = agent_seed(ctx.run_seed, i);
    agents.push_back(std::visit(
        [&](const auto& k) -> std::unique_ptr<PricingAgent> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, LlmAgentSpec>) {
            llm::LlmAgentConfig cfg = k.config;
            cfg.seller_label = agent.label;
            auto style = spec.market.n == 1 ? llm::PromptStyle::Monopoly : llm::PromptStyle::Oligopoly;
            return std::make_unique<LlmPricingAgent>(
                llm::LlmAgent(cfg, llm::make_backend(cfg.backend), style), labels, n, spec.market.c);
          } else if constexpr (std::is_same_v<T, QAgentSpec>) {
            qlearn::PretrainResult tables = qlearn::load_tables(k.table_file);
            const auto& m = tables.market;
            if (m.a != spec.market.a || m.mu != spec.market.mu || m.a0 != spec.market.a0 ||
                m.c != spec.market.c)
              throw ConfigError("Q-table " + k.table_file.string() +
                                " was trained on a different market");
            if (k.table_index < 0 || k.table_index > 1)
              throw ConfigError("Q-table index must be 0 or 1");
            const int start = k.initial_index >= 0
                                  ? k.initial_index
                                  : tables.params.grid.nearest(ctx.benchmarks.competitive.price);
            return std::make_unique<QPricingAgent>(qlearn::QAgent(
                tables.tables[k.table_index], tables.params, k.mode, seed, start, start,
                k.continue_clock ? tables.periods : 0));
          } else if constexpr (std::is_same_v<T, GrimTriggerSpec>) {
            if (k.public_signal)
              return std::make_unique<GrimPricingAgent>(
                  rules::GrimTriggerAgent(k.config, signal, detect, i));
            return std::make_unique<GrimPricingAgent>(rules::GrimTriggerAgent(k.config, seed));
          } else if constexpr (std::is_same_v<T, ConstantSpec>) {
            return std::make_unique<ConstantAgent>(k.price);
          } else {
            return std::make_unique<ScriptedPricingAgent>(k.script);
          }
        },
        agent.kind));
  }
  return agents;
}

const PeriodRecord& step(const ExperimentSpec& spec, RunState& state, long long t) {
  const int n = static_cast<int>(state.agents.size());
  if (spec.agents.size() != static_cast<std::size_t>(n))
    throw ContractViolation("agent roster and spec disagree");
  const std::span<const PeriodRecord> past(state.history);

  auto decide = [&](int i) {
    try {
      return state.agents[i]->decide(AgentView(t, i, spec.agents[i].info_access(), past));
    } catch (const Error& e) {
      throw AgentFailure(spec.agents[i].label + " failed in round " + std::to_string(t + 1) + ": " +
                         e.what());
    }
  };

  std::vector<AgentAction> actions(n);
  if (spec.concurrent_decisions && n > 1) {
    std::vector<std::future<AgentAction>> pending;
    for (int i = 0; i < n; ++i) pending.push_back(std::async(std::launch::async, decide, i));
    for (int i = 0; i < n; ++i) actions[i] = pending[i].get();
  } else {
    for (int i = 0; i < n; ++i) actions[i] = decide(i);
  }

  PeriodRecord record;
  record.t = t;
  for (auto& action : actions) {
    record.prices.push_back(action.price);
    record.outputs.push_back(std::move(action.output));
  }
  market::MarketOutcome outcome;
  try {
    outcome = market::market_outcome(spec.market, market::PriceVector(record.prices));
  } catch (const ContractViolation& e) {
    throw AgentFailure(std::string("invalid price submitted: ") + e.what());
  }
  record.quantities = std::move(outcome.quantities);
  record.profits = std::move(outcome.profits);
  record.outside_share = outcome.outside_share;
  state.history.push_back(std::move(record));
  for (int i = 0; i < n; ++i) state.agents[i]->observe(state.history.back(), i);
  return state.history.back();
}

bool period_within_band(std::span<const double> prices, double band) {
  const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
  return *hi - *lo <= band * *lo * (1.0 + 1e-9);
}

bool ConvergenceTracker::push(std::span<const double> prices) {
  ++periods_;
  streak_ = period_within_band(prices, rule_.band) ? streak_ + 1 : 0;
  if (!state_.converged && streak_ >= rule_.window) {
    state_.converged = true;
    state_.round = periods_;
  }
  return state_.converged;
}

ConvergenceCheck check_convergence(std::span<const std::vector<double>> prices,
                                   const ConvergenceRule& rule) {
  rule.validate();
  ConvergenceTracker tracker(rule);
  for (const auto& p : prices)
    if (tracker.push(p)) break;
  return tracker.state();
}

ConvergenceCheck check_convergence(std::span<const PeriodRecord> history,
                                   const ConvergenceRule& rule) {
  rule.validate();
  ConvergenceTracker tracker(rule);
  for (const auto& record : history)
    if (tracker.push(record.prices)) break;
  return tracker.state();
}

double price_elevation(double avg, double p_competitive) {
  if (!(p_competitive > 0.0)) throw ContractViolation("competitive price must be positive");
  return (avg - p_competitive) / p_competitive;
}

double avg_price(const RunLog& log, const ConvergenceRule& rule) {
  if (log.periods.empty()) throw ContractViolation("empty run log");
  const ConvergenceCheck check = check_convergence(std::span<const PeriodRecord>(log.periods), rule);
  if (!check.converged) {
    const auto& last = log.periods.back().prices;
    return *std::min_element(last.begin(), last.end());
  }
  const int end = *check.round;  // periods [end - window, end)
  double total = 0.0;
  std::size_t count = 0;
  for (int k = end - rule.window; k < end; ++k) {
    for (double p : log.periods[k].prices) {
      total += p;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

RunSummary summarize_run(const RunLog& log, const ConvergenceRule& rule, double p_competitive) {
  if (log.periods.empty()) throw ContractViolation("empty run log");
  const ConvergenceCheck check = check_convergence(std::span<const PeriodRecord>(log.periods), rule);
  RunSummary summary;
  summary.run_index = log.run_index;
  summary.converged = check.converged;
  summary.rounds_to_convergence = check.round;
  summary.avg_price = avg_price(log, rule);
  const auto& last = log.periods.back().prices;
  summary.terminal_lowest_price = *std::min_element(last.begin(), last.end());
  summary.price_elevation = price_elevation(summary.avg_price, p_competitive);
  summary.periods = static_cast<int>(log.periods.size());
  return summary;
}

std::pair<RunLog, RunSummary> run_with_agents(const ExperimentSpec& spec, int run_index,
                                              std::vector<std::unique_ptr<PricingAgent>> agents,
                                              RunSink* sink) {
  spec.validate();
  const double p_competitive = equilibrium::nash_logit(spec.market).price;
  RunLog log;
  log.condition = spec.condition;
  log.run_index = run_index;
  log.seed = run_seed(spec.seed, run_index);
  if (sink) sink->begin(spec, run_index, log.seed);

  RunState state{std::move(agents), {}};
  ConvergenceTracker tracker(spec.convergence);
  for (long long t = 0; t < spec.max_periods; ++t) {
    try {
      step(spec, state, t);
    } catch (const AgentFailure& e) {
      log.aborted = true;
      log.abort_reason = e.what();
      if (sink) sink->abort(t, log.abort_reason);
      throw RunAborted("run " + std::to_string(run_index) + " aborted: " + log.abort_reason);
    }
    if (sink) sink->period(state.history.back());
    if (tracker.push(state.history.back().prices) && spec.stop_on_convergence) break;
  }
  log.periods = std::move(state.history);
  RunSummary summary = summarize_run(log, spec.convergence, p_competitive);
  if (sink) sink->end(summary);
  return {std::move(log), summary};
}

std::pair<RunLog, RunSummary> run(const ExperimentSpec& spec, int run_index, RunSink* sink) {
  spec.validate();
  RunContext ctx;
  ctx.spec = &spec;
  ctx.benchmarks = equilibrium::solve_benchmarks(spec.market);
  ctx.run_index = run_index;
  ctx.run_seed = run_seed(spec.seed, run_index);
  return run_with_agents(spec, run_index, make_agents(ctx), sink);
}

ExperimentSpec replay_spec(const ExperimentSpec& original, const RunLog& log) {
  ExperimentSpec spec = original;
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    rules::ScriptedAgent script;
    script.hold_last = false;
    for (const auto& record : log.periods) script.trajectory.push_back(record.prices[i]);
    spec.agents[i].kind = ScriptedSpec{std::move(script)};
  }
  return spec;
}

}  // namespace pricelab::engine
