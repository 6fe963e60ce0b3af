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

#include "pricelab/qlearning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "pricelab/equilibrium.hpp"
#include "pricelab/errors.hpp"

namespace pricelab::qlearn {

int PriceGrid::nearest(double price) const {
  int best = 0;
  double best_gap = std::abs(points[0] - price);
  for (int i = 1; i < size(); ++i) {
    const double gap = std::abs(points[i] - price);
    if (gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

void PriceGrid::validate() const {
  if (points.size() < 2) throw ContractViolation("price grid needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw ContractViolation("price grid points must be finite");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw ContractViolation("price grid must be strictly increasing");
  }
}

PriceGrid PriceGrid::around(double p_competitive, double p_monopoly, int m, double xi) {
  if (m < 2) throw ContractViolation("price grid needs at least two points");
  const double span = p_monopoly - p_competitive;
  const double lo = p_competitive - xi * span;
  const double hi = p_monopoly + xi * span;
  PriceGrid grid;
  grid.points.resize(m);
  for (int i = 0; i < m; ++i) grid.points[i] = lo + (hi - lo) * i / (m - 1);
  grid.validate();
  return grid;
}

void QParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractViolation("alpha must lie in (0, 1]");
  if (!(beta > 0.0)) throw ContractViolation("beta must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw ContractViolation("delta must lie in [0, 1)");
  grid.validate();
}

QTable::QTable(int num_states, int num_actions, double fill)
    : states_(num_states), actions_(num_actions),
      values_(static_cast<std::size_t>(num_states) * num_actions, fill) {
  if (num_states < 1 || num_actions < 1) throw ContractViolation("empty Q-table");
}

std::span<const double> QTable::row(int state) const {
  return std::span<const double>(values_).subspan(index(state, 0), actions_);
}

int QTable::greedy(int state) const {
  const auto r = row(state);
  return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

double QTable::max_value(int state) const {
  const auto r = row(state);
  return *std::max_element(r.begin(), r.end());
}

double epsilon(long long t, double beta) { return std::exp(-static_cast<double>(t) * beta); }

Choice select_action_traced(const QTable& table, int state, double eps, std::mt19937_64& rng) {
  if (eps > 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < eps) {
      std::uniform_int_distribution<int> pick(0, table.num_actions() - 1);
      return {pick(rng), true};
    }
  }
  return {table.greedy(state), false};
}

double q_update(QTable& table, int state, int action, double reward, int next_state,
                const QParams& params) {
  const double target = reward + params.delta * table.max_value(next_state);
  double& entry = table(state, action);
  entry = (1.0 - params.alpha) * entry + params.alpha * target;
  return entry;
}

std::vector<double> profit_matrix(const QParams& params, const market::LogitMarketParams& market) {
  if (market.n != 2) throw ContractViolation("Q-learning pricing requires a duopoly");
  const int m = params.grid.size();
  std::vector<double> profit(static_cast<std::size_t>(m) * m);
  for (int own = 0; own < m; ++own) {
    for (int rival = 0; rival < m; ++rival) {
      const auto out = market::market_outcome(
          market, market::PriceVector{params.grid.points[own], params.grid.points[rival]});
      profit[own * m + rival] = out.profits[0];
    }
  }
  return profit;
}

QTable initial_table(const QParams& params, const market::LogitMarketParams& market, QInit init) {
  params.validate();
  const int m = params.grid.size();
  QTable table = QTable::for_grid(m);
  if (init == QInit::Zero) return table;
  const auto profit = profit_matrix(params, market);
  for (int action = 0; action < m; ++action) {
    double mean = 0.0;
    for (int rival = 0; rival < m; ++rival) mean += profit[action * m + rival];
    mean /= m;
    const double value = mean / (1.0 - params.delta);
    for (int s = 0; s < m * m; ++s) table(s, action) = value;
  }
  return table;
}

PretrainResult pretrain(const QParams& params, const market::LogitMarketParams& market,
                        const PretrainOptions& options) {
  params.validate();
  market.validate();
  if (options.stability_window < 1) throw ContractViolation("stability window must be >= 1");
  if (options.cap < options.stability_window)
    throw ContractViolation("period cap must be >= stability window");

  const int m = params.grid.size();
  const auto profit = profit_matrix(params, market);
  int start = options.initial_index;
  if (start < 0) start = params.grid.nearest(equilibrium::nash_logit(market).price);
  if (start >= m) throw ContractViolation("initial grid index out of range");

  PretrainResult result;
  result.params = params;
  result.market = market;
  result.seed = options.seed;
  result.init = options.init;
  result.tables[0] = initial_table(params, market, options.init);
  result.tables[1] = result.tables[0];

  std::array<std::vector<int>, 2> greedy;
  for (int k = 0; k < 2; ++k) {
    greedy[k].resize(m * m);
    for (int s = 0; s < m * m; ++s) greedy[k][s] = result.tables[k].greedy(s);
  }

  std::mt19937_64 rng(options.seed);
  std::array<int, 2> prev{start, start};
  long long stable = 0;
  long long t = 0;
  while (t < options.cap) {
    const double eps = epsilon(t, params.beta);
    const std::array<int, 2> state{QTable::state_of(prev[0], prev[1], m),
                                   QTable::state_of(prev[1], prev[0], m)};
    std::array<int, 2> action{};
    for (int k = 0; k < 2; ++k) action[k] = select_action(result.tables[k], state[k], eps, rng);

    bool changed = false;
    for (int k = 0; k < 2; ++k) {
      const int own = action[k], rival = action[1 - k];
      q_update(result.tables[k], state[k], own, profit[own * m + rival],
               QTable::state_of(own, rival, m), params);
      const int g = result.tables[k].greedy(state[k]);
      if (g != greedy[k][state[k]]) {
        greedy[k][state[k]] = g;
        changed = true;
      }
    }
    prev = action;
    ++t;
    stable = changed ? 0 : stable + 1;
    if (stable >= options.stability_window) {
      result.converged = true;
      break;
    }
  }
  result.periods = t;
  result.final_state = prev;
  return result;
}

GreedyPlay greedy_self_play(const QTable& first, const QTable& second, const PriceGrid& grid,
                            std::array<int, 2> start) {
  const int m = first.num_actions();
  std::map<std::array<int, 2>, std::size_t> seen;
  std::vector<std::array<int, 2>> path;
  std::array<int, 2> cur = start;
  while (!seen.contains(cur)) {
    seen.emplace(cur, path.size());
    path.push_back(cur);
    cur = {first.greedy(QTable::state_of(cur[0], cur[1], m)),
           second.greedy(QTable::state_of(cur[1], cur[0], m))};
  }
  GreedyPlay play;
  play.cycle.assign(path.begin() + static_cast<std::ptrdiff_t>(seen.at(cur)), path.end());
  double total = 0.0;
  for (const auto& [own, rival] : play.cycle) total += grid.points[own] + grid.points[rival];
  play.avg_price = total / (2.0 * static_cast<double>(play.cycle.size()));
  return play;
}

double act(const QTable& table, QMode mode, int state, long long t, const QParams& params,
           std::mt19937_64& rng) {
  const int action = mode == QMode::Frozen
                         ? table.greedy(state)
                         : select_action(table, state, epsilon(t, params.beta), rng);
  return params.grid.points[action];
}

QAgent::QAgent(QTable table, QParams params, QMode mode, std::uint64_t seed, int initial_own,
               int initial_rival, long long clock_start)
    : table_(std::move(table)), params_(std::move(params)), mode_(mode), rng_(seed),
      clock_(clock_start) {
  params_.validate();
  const int m = params_.grid.size();
  if (table_.num_actions() != m || table_.num_states() != m * m)
    throw ContractViolation("Q-table shape does not match the price grid");
  if (initial_own < 0 || initial_own >= m || initial_rival < 0 || initial_rival >= m)
    throw ContractViolation("initial state outside the price grid");
  state_ = QTable::state_of(initial_own, initial_rival, m);
}

double QAgent::decide() {
  if (mode_ == QMode::Frozen) {
    last_action_ = table_.greedy(state_);
  } else {
    last_action_ = select_action(table_, state_, epsilon(clock_, params_.beta), rng_);
  }
  return params_.grid.points[last_action_];
}

void QAgent::learn(double /*own_price*/, double rival_price, double profit) {
  if (last_action_ < 0) throw ContractViolation("learn() called before decide()");
  const int m = params_.grid.size();
  const int next = QTable::state_of(last_action_, params_.grid.nearest(rival_price), m);
  if (mode_ == QMode::Adaptive) {
    q_update(table_, state_, last_action_, profit, next, params_);
    ++clock_;
  }
  state_ = next;
  last_action_ = -1;
}

// File layout (little-endian):
//   char[8] magic "PLQTAB01", u32 version, u32 m, f64 grid[m],
//   f64 alpha, beta, delta, f64 a, mu, a0, c, u64 seed, u64 periods,
//   u8 converged, u8 init, u32 final_state[2], u32 table_count,
//   then table_count tables of m*m*m f64, row-major [state][action].
namespace {

static_assert(std::endian::native == std::endian::little, "table files assume little-endian hosts");

constexpr char kMagic[8] = {'P', 'L', 'Q', 'T', 'A', 'B', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated Q-table file");
  return value;
}

}  // namespace

void save_tables(const std::filesystem::path& path, const PretrainResult& result) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const auto m = static_cast<std::uint32_t>(result.params.grid.size());
  out.write(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, m);
  for (double p : result.params.grid.points) put(out, p);
  put(out, result.params.alpha);
  put(out, result.params.beta);
  put(out, result.params.delta);
  put(out, result.market.a);
  put(out, result.market.mu);
  put(out, result.market.a0);
  put(out, result.market.c);
  put(out, static_cast<std::uint64_t>(result.seed));
  put(out, static_cast<std::uint64_t>(result.periods));
  put(out, static_cast<std::uint8_t>(result.converged));
  put(out, static_cast<std::uint8_t>(result.init == QInit::Zero));
  put(out, static_cast<std::uint32_t>(result.final_state[0]));
  put(out, static_cast<std::uint32_t>(result.final_state[1]));
  put(out, static_cast<std::uint32_t>(result.tables.size()));
  for (const auto& table : result.tables) {
    out.write(reinterpret_cast<const char*>(table.values().data()),
              static_cast<std::streamsize>(table.values().size() * sizeof(double)));
  }
  if (!out) throw Error("failed writing " + path.string());
}

PretrainResult load_tables(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError(path.string() + " is not a Q-table file");
  if (const auto version = get<std::uint32_t>(in); version != kVersion)
    throw FormatError("unsupported Q-table file version " + std::to_string(version));

  PretrainResult result;
  const auto m = get<std::uint32_t>(in);
  if (m < 2 || m > 4096) throw FormatError("implausible grid size in Q-table file");
  result.params.grid.points.resize(m);
  for (auto& p : result.params.grid.points) p = get<double>(in);
  result.params.alpha = get<double>(in);
  result.params.beta = get<double>(in);
  result.params.delta = get<double>(in);
  result.market.a = get<double>(in);
  result.market.mu = get<double>(in);
  result.market.a0 = get<double>(in);
  result.market.c = get<double>(in);
  result.market.n = 2;
  result.seed = get<std::uint64_t>(in);
  result.periods = static_cast<long long>(get<std::uint64_t>(in));
  result.converged = get<std::uint8_t>(in) != 0;
  result.init = get<std::uint8_t>(in) != 0 ? QInit::Zero : QInit::UniformRival;
  result.final_state[0] = static_cast<int>(get<std::uint32_t>(in));
  result.final_state[1] = static_cast<int>(get<std::uint32_t>(in));
  const auto count = get<std::uint32_t>(in);
  if (count != result.tables.size()) throw FormatError("Q-table file must hold two tables");
  const int mi = static_cast<int>(m);
  for (auto& table : result.tables) {
    table = QTable::for_grid(mi);
    for (int s = 0; s < mi * mi; ++s)
      for (int a = 0; a < mi; ++a) table(s, a) = get<double>(in);
  }
  result.params.validate();
  return result;
}

}  // namespace pricelab::qlearn
