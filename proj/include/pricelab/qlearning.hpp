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

// Tabular Q-learning pricing agents. The state is the previous period's
// price pair seen from the agent's own side, (own index, rival index);
// actions are indices into a shared price grid.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "pricelab/market.hpp"

namespace pricelab::qlearn {

struct PriceGrid {
  std::vector<double> points;

  int size() const { return static_cast<int>(points.size()); }
  // Index of the nearest grid point; ties go to the lower index.
  int nearest(double price) const;
  void validate() const;

  // m equispaced points on [p_c - xi (p_m - p_c), p_m + xi (p_m - p_c)].
  static PriceGrid around(double p_competitive, double p_monopoly, int m = 15, double xi = 0.1);
};

struct QParams {
  double alpha = 0.15;
  double beta = 0.004;
  double delta = 0.95;
  PriceGrid grid;

  void validate() const;
};

enum class QInit { UniformRival, Zero };
enum class QMode { Frozen, Adaptive };

class QTable {
 public:
  QTable() = default;
  QTable(int num_states, int num_actions, double fill = 0.0);
  // m^2 price-pair states by m actions.
  static QTable for_grid(int m, double fill = 0.0) { return QTable(m * m, m, fill); }
  static int state_of(int own, int rival, int m) { return own * m + rival; }

  int num_states() const { return states_; }
  int num_actions() const { return actions_; }
  double operator()(int state, int action) const { return values_[index(state, action)]; }
  double& operator()(int state, int action) { return values_[index(state, action)]; }
  std::span<const double> row(int state) const;
  std::span<const double> values() const { return values_; }

  // Lowest index among maximal entries.
  int greedy(int state) const;
  double max_value(int state) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(int state, int action) const {
    return static_cast<std::size_t>(state) * actions_ + action;
  }
  int states_ = 0;
  int actions_ = 0;
  std::vector<double> values_;
};

// e^(-t beta)
double epsilon(long long t, double beta);

struct Choice {
  int action;
  bool explored;  // drawn uniformly rather than greedily
};

Choice select_action_traced(const QTable& table, int state, double eps, std::mt19937_64& rng);
inline int select_action(const QTable& table, int state, double eps, std::mt19937_64& rng) {
  return select_action_traced(table, state, eps, rng).action;
}

// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (reward + delta max_a' Q(s',a')).
// Returns the new entry.
double q_update(QTable& table, int state, int action, double reward, int next_state,
                const QParams& params);

// Own-profit matrix on the grid for a duopoly: profit[own * m + rival].
std::vector<double> profit_matrix(const QParams& params, const market::LogitMarketParams& market);

QTable initial_table(const QParams& params, const market::LogitMarketParams& market, QInit init);

struct PretrainOptions {
  long long stability_window = 10'000;
  long long cap = 5'000'000;
  std::uint64_t seed = 0;
  QInit init = QInit::UniformRival;
  int initial_index = -1;  // both sellers' previous price; -1: nearest p^C
};

struct PretrainResult {
  std::array<QTable, 2> tables;
  QParams params;
  market::LogitMarketParams market;
  long long periods = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  QInit init = QInit::UniformRival;
  std::array<int, 2> final_state{};  // (seller 1 index, seller 2 index) of the last period
};

// Self-play of two learners until every greedy action is unchanged for
// stability_window consecutive periods, or cap periods.
PretrainResult pretrain(const QParams& params, const market::LogitMarketParams& market,
                        const PretrainOptions& options);

struct GreedyPlay {
  double avg_price = 0.0;  // both sellers, over the limit cycle
  std::vector<std::array<int, 2>> cycle;
};

GreedyPlay greedy_self_play(const QTable& first, const QTable& second, const PriceGrid& grid,
                            std::array<int, 2> start);

// Price chosen in `state` at clock t. Frozen: greedy, rng untouched.
// Adaptive: epsilon-greedy with epsilon(t, beta).
double act(const QTable& table, QMode mode, int state, long long t, const QParams& params,
           std::mt19937_64& rng);

// A pretrained learner paired with an arbitrary opponent. Rival prices off
// the grid are snapped to the nearest point for state construction only.
class QAgent {
 public:
  QAgent(QTable table, QParams params, QMode mode, std::uint64_t seed, int initial_own,
         int initial_rival, long long clock_start = 0);

  double decide();
  // Applies the adaptive update for the decision just taken; no-op when frozen.
  void learn(double own_price, double rival_price, double profit);

  const QTable& table() const { return table_; }
  QMode mode() const { return mode_; }
  int state() const { return state_; }
  long long clock() const { return clock_; }

 private:
  QTable table_;
  QParams params_;
  QMode mode_;
  std::mt19937_64 rng_;
  int state_;
  int last_action_ = -1;
  long long clock_;
};

// Versioned binary persistence of pretrained tables.
void save_tables(const std::filesystem::path& path, const PretrainResult& result);
PretrainResult load_tables(const std::filesystem::path& path);

}  // namespace pricelab::qlearn
