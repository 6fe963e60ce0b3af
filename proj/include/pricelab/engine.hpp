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

// Experiment orchestration: agent roster, period loop, convergence
// detection and per-run summary metrics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pricelab/equilibrium.hpp"
#include "pricelab/llm_agent.hpp"
#include "pricelab/market.hpp"
#include "pricelab/qlearning.hpp"
#include "pricelab/rules.hpp"

namespace pricelab::engine {

struct ConvergenceRule {
  int window = 100;
  double band = 0.05;  // inclusive, relative to the period's lowest price

  void validate() const;
  friend bool operator==(const ConvergenceRule&, const ConvergenceRule&) = default;
};

struct LlmAgentSpec {
  llm::LlmAgentConfig config;
};

struct QAgentSpec {
  std::filesystem::path table_file;
  int table_index = 0;
  qlearn::QMode mode = qlearn::QMode::Frozen;
  // Adaptive only: continue the exploration clock from pretraining instead
  // of restarting at 0.
  bool continue_clock = false;
  int initial_index = -1;  // both previous prices; -1: grid point nearest p^C
};

struct GrimTriggerSpec {
  rules::GrimTriggerConfig config;
  // Share one public signal stream with every other grim-trigger agent.
  bool public_signal = true;
};

struct ConstantSpec {
  double price = 1.0;
};

struct ScriptedSpec {
  rules::ScriptedAgent script;
};

using AgentKind = std::variant<LlmAgentSpec, QAgentSpec, GrimTriggerSpec, ConstantSpec, ScriptedSpec>;

struct AgentSpec {
  std::string label;  // "Seller 1", ...
  AgentKind kind;

  llm::InfoAccess info_access() const;
  std::string family() const;
};

struct ExperimentSpec {
  std::string condition = "condition";
  market::LogitMarketParams market;
  std::vector<AgentSpec> agents;
  int max_periods = 1000;
  ConvergenceRule convergence;
  bool stop_on_convergence = true;
  int runs = 1;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir;
  // Collect the agents' prices for a period concurrently.
  bool concurrent_decisions = false;

  void validate() const;
};

// Per-agent output of one period.
struct AgentOutput {
  std::string prompt;                  // empty for non-LLM agents
  std::vector<std::string> responses;  // every attempt's reply, in order
  int attempts = 0;
  double latency_ms = 0.0;
  std::vector<std::string> warnings;
  std::string raw_ref;  // "<io file>#<line>" once persisted
};

struct PeriodRecord {
  long long t = 0;  // 0-based; the prompt round is t + 1
  std::vector<double> prices;
  std::vector<double> quantities;
  std::vector<double> profits;
  double outside_share = 0.0;
  std::vector<AgentOutput> outputs;
};

// What seller `self` may observe when choosing its period-t price: periods
// [0, t) only, rival prices only with full information access.
class AgentView {
 public:
  AgentView(long long t, int self, llm::InfoAccess access, std::span<const PeriodRecord> history)
      : t_(t), self_(self), access_(access), history_(history) {}

  long long t() const { return t_; }
  int self() const { return self_; }
  llm::InfoAccess access() const { return access_; }
  std::size_t periods() const { return history_.size(); }
  double own_price(std::size_t k) const { return history_[k].prices[self_]; }
  double own_quantity(std::size_t k) const { return history_[k].quantities[self_]; }
  double own_profit(std::size_t k) const { return history_[k].profits[self_]; }
  // Throws ContractViolation under OwnOnly.
  double price_of(std::size_t k, int seller) const;
  // Every seller's price in period k, for agents allowed to see rivals.
  std::span<const double> prices(std::size_t k) const;

 private:
  long long t_;
  int self_;
  llm::InfoAccess access_;
  std::span<const PeriodRecord> history_;
};

struct AgentAction {
  double price = 0.0;
  AgentOutput output;
};

class PricingAgent {
 public:
  virtual ~PricingAgent() = default;
  virtual AgentAction decide(const AgentView& view) = 0;
  // Called once the period's outcome is known.
  virtual void observe(const PeriodRecord& /*record*/, int /*self*/) {}
};

struct RunContext {
  const ExperimentSpec* spec = nullptr;
  equilibrium::Benchmarks benchmarks;
  int run_index = 0;
  std::uint64_t run_seed = 0;
};

using AgentFactory =
    std::function<std::unique_ptr<PricingAgent>(const AgentSpec&, int self, const RunContext&)>;

// Builds every agent family from its spec.
std::vector<std::unique_ptr<PricingAgent>> make_agents(const RunContext& ctx);

struct RunState {
  std::vector<std::unique_ptr<PricingAgent>> agents;
  std::vector<PeriodRecord> history;
};

// Collects one price per agent (each sees periods < t), clears the market
// and appends the record. Propagates AgentFailure.
const PeriodRecord& step(const ExperimentSpec& spec, RunState& state, long long t);

struct ConvergenceCheck {
  bool converged = false;
  std::optional<int> round;  // 1-based last period of the first qualifying window
};

// Spread max - min within band * min (inclusive, 1e-9 relative slack).
bool period_within_band(std::span<const double> prices, double band);

ConvergenceCheck check_convergence(std::span<const std::vector<double>> prices,
                                   const ConvergenceRule& rule);
ConvergenceCheck check_convergence(std::span<const PeriodRecord> history,
                                   const ConvergenceRule& rule);

// Incremental form of check_convergence used by the period loop.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(ConvergenceRule rule) : rule_(rule) {}
  // Feeds the next period; returns true once converged.
  bool push(std::span<const double> prices);
  const ConvergenceCheck& state() const { return state_; }

 private:
  ConvergenceRule rule_;
  int streak_ = 0;
  int periods_ = 0;
  ConvergenceCheck state_;
};

struct RunLog {
  std::string condition;
  int run_index = 0;
  std::uint64_t seed = 0;
  std::vector<PeriodRecord> periods;
  bool aborted = false;
  std::string abort_reason;
};

struct RunSummary {
  int run_index = 0;
  bool converged = false;
  std::optional<int> rounds_to_convergence;
  double avg_price = 0.0;
  double terminal_lowest_price = 0.0;
  double price_elevation = 0.0;
  int periods = 0;
};

double price_elevation(double avg_price, double p_competitive);

// Converged: mean of all sellers' prices over the qualifying window.
// Otherwise: lowest price in the final period.
double avg_price(const RunLog& log, const ConvergenceRule& rule);

RunSummary summarize_run(const RunLog& log, const ConvergenceRule& rule, double p_competitive);

// Deterministic seed for run `run_index` of a condition.
std::uint64_t run_seed(std::uint64_t base_seed, int run_index);

class RunSink;

// Executes one run. With a sink, every period is persisted as it happens
// and an abort is recorded before RunAborted is thrown.
std::pair<RunLog, RunSummary> run(const ExperimentSpec& spec, int run_index,
                                  RunSink* sink = nullptr);

// As run(), but with externally built agents (tests, custom families).
std::pair<RunLog, RunSummary> run_with_agents(const ExperimentSpec& spec, int run_index,
                                              std::vector<std::unique_ptr<PricingAgent>> agents,
                                              RunSink* sink = nullptr);

// Scripted roster replaying every seller's recorded prices.
ExperimentSpec replay_spec(const ExperimentSpec& original, const RunLog& log);

}  // namespace pricelab::engine
