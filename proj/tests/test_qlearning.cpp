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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "pricelab/equilibrium.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/qlearning.hpp"

using namespace pricelab;
using namespace pricelab::qlearn;
using market::LogitMarketParams;

namespace {

QParams baseline_params(int m = 15) {
  const auto b = equilibrium::solve_benchmarks(LogitMarketParams::baseline());
  QParams p;
  p.grid = PriceGrid::around(b.competitive.price, b.monopoly.price, m, 0.1);
  return p;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pricelab_test_" + name);
}

}  // namespace

TEST_CASE("exploration schedule") {
  CHECK(epsilon(0, 0.004) == 1.0);
  CHECK(epsilon(1000, 0.004) == doctest::Approx(std::exp(-4.0)));
  CHECK(epsilon(1000, 0.004) == doctest::Approx(0.0183).epsilon(1e-3));
  CHECK(epsilon(250, 0.004) == doctest::Approx(0.3679).epsilon(1e-4));
}

TEST_CASE("price grid") {
  const auto p = baseline_params();
  CHECK(p.grid.size() == 15);
  const double pc = 1.472927, pm = 1.924981, span = pm - pc;
  CHECK(p.grid.points.front() == doctest::Approx(pc - 0.1 * span).epsilon(1e-6));
  CHECK(p.grid.points.back() == doctest::Approx(pm + 0.1 * span).epsilon(1e-6));
  for (int i = 1; i < p.grid.size(); ++i) CHECK(p.grid.points[i] > p.grid.points[i - 1]);

  PriceGrid g{{1.0, 2.0, 3.0}};
  CHECK(g.nearest(1.5) == 0);
  CHECK(g.nearest(1.51) == 1);
  CHECK(g.nearest(-4.0) == 0);
  CHECK(g.nearest(99.0) == 2);
  CHECK_THROWS_AS(PriceGrid({{1.0, 1.0}}).validate(), ContractViolation);
  CHECK_THROWS_AS(PriceGrid({{1.0}}).validate(), ContractViolation);
}

TEST_CASE("action selection") {
  QTable t(1, 4, 0.0);
  t(0, 1) = 2.0;
  t(0, 3) = 2.0;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) CHECK(select_action(t, 0, 0.0, rng) == 1);
  CHECK(t.greedy(0) == 1);

  SUBCASE("uniform exploration passes a chi-square test") {
    QTable wide(1, 15, 0.0);
    wide(0, 7) = 1.0;
    std::vector<int> counts(15, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const auto c = select_action_traced(wide, 0, 1.0, rng);
      CHECK(c.explored);
      ++counts[c.action];
    }
    double chi2 = 0.0;
    const double expected = draws / 15.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 36.12);  // chi-square(14) upper 0.1% point
  }
}

TEST_CASE("exploration count follows the decay integral") {
  QTable t(1, 15, 0.0);
  std::mt19937_64 rng(77);
  double expected = 0.0, variance = 0.0;
  int explored = 0;
  for (long long s = 0; s < 10000; ++s) {
    const double eps = epsilon(s, 0.004);
    expected += eps;
    variance += eps * (1.0 - eps);
    explored += select_action_traced(t, 0, eps, rng).explored ? 1 : 0;
  }
  CHECK(std::abs(explored - expected) <= 3.0 * std::sqrt(variance));
  CHECK(expected == doctest::Approx(1.0 / (1.0 - std::exp(-0.004))).epsilon(1e-3));
}

TEST_CASE("q update arithmetic") {
  QParams p = baseline_params(5);

  QTable zero = QTable::for_grid(5);
  CHECK(q_update(zero, 0, 0, 1.0, 3, p) == doctest::Approx(0.15));

  QTable full = QTable::for_grid(5);
  full(3, 2) = 4.0;
  auto replace = p;
  replace.alpha = 1.0;
  CHECK(q_update(full, 0, 1, 0.5, 3, replace) == doctest::Approx(0.5 + 0.95 * 4.0));

  QTable t = QTable::for_grid(5);
  t(6, 2) = 2.0;
  t(9, 4) = 3.0;
  const QTable before = t;
  CHECK(q_update(t, 6, 2, 1.0, 9, p) == doctest::Approx(2.2775));
  for (int s = 0; s < t.num_states(); ++s)
    for (int a = 0; a < t.num_actions(); ++a)
      if (!(s == 6 && a == 2)) CHECK(t(s, a) == before(s, a));
}

TEST_CASE("Q-values converge to the Bellman solution on a three-state chain") {
  // One action per state: 0 -> 1 -> 2 -> 0 with rewards r.
  const double r[3] = {1.0, -0.5, 2.0};
  QParams p = baseline_params(3);
  p.alpha = 0.15;
  p.delta = 0.9;

  // Oracle: (I - delta P) v = r, solved by Gaussian elimination.
  double A[3][4] = {{1, -p.delta, 0, r[0]}, {0, 1, -p.delta, r[1]}, {-p.delta, 0, 1, r[2]}};
  for (int col = 0; col < 3; ++col) {
    for (int row = col + 1; row < 3; ++row) {
      const double f = A[row][col] / A[col][col];
      for (int k = col; k < 4; ++k) A[row][k] -= f * A[col][k];
    }
  }
  double v[3];
  for (int row = 2; row >= 0; --row) {
    double s = A[row][3];
    for (int k = row + 1; k < 3; ++k) s -= A[row][k] * v[k];
    v[row] = s / A[row][row];
  }

  QTable t(3, 1, 0.0);
  int s = 0;
  for (int i = 0; i < 30000; ++i) {
    const int next = (s + 1) % 3;
    q_update(t, s, 0, r[s], next, p);
    s = next;
  }
  for (int k = 0; k < 3; ++k) CHECK(t(k, 0) == doctest::Approx(v[k]).epsilon(1e-8));
}

TEST_CASE("initial table against a uniform rival") {
  const auto p = baseline_params(5);
  const auto market = LogitMarketParams::baseline();
  const auto t = initial_table(p, market, QInit::UniformRival);
  for (int a = 0; a < 5; ++a) {
    double mean = 0.0;
    for (int r = 0; r < 5; ++r)
      mean += market::market_outcome(market, {p.grid.points[a], p.grid.points[r]}).profits[0] / 5.0;
    for (int s = 0; s < 25; ++s) CHECK(t(s, a) == doctest::Approx(mean / (1.0 - p.delta)).epsilon(1e-12));
  }
  const auto z = initial_table(p, market, QInit::Zero);
  for (double x : z.values()) CHECK(x == 0.0);
  CHECK_THROWS_AS(initial_table(p, LogitMarketParams::baseline(3), QInit::UniformRival),
                  ContractViolation);
}

TEST_CASE("pretraining") {
  const auto p = baseline_params();
  const auto market = LogitMarketParams::baseline();

  SUBCASE("seeded runs are bit-identical") {
    PretrainOptions o;
    o.stability_window = 2000;
    o.cap = 400000;
    o.seed = 3;
    const auto a = pretrain(p, market, o), b = pretrain(p, market, o);
    CHECK(a.periods == b.periods);
    CHECK(a.tables[0] == b.tables[0]);
    CHECK(a.tables[1] == b.tables[1]);
    o.seed = 4;
    const auto c = pretrain(p, market, o);
    CHECK_FALSE(c.tables[0] == a.tables[0]);
  }

  SUBCASE("vacuous window") {
    PretrainOptions o;
    o.stability_window = 1;
    o.cap = 1000;
    const auto r = pretrain(p, market, o);
    CHECK(r.converged);
    CHECK(r.periods < 1000);
  }

  SUBCASE("cap below window is rejected") {
    PretrainOptions o;
    o.stability_window = 100;
    o.cap = 10;
    CHECK_THROWS_AS(pretrain(p, market, o), ContractViolation);
  }

  SUBCASE("cap reached") {
    PretrainOptions o;
    o.stability_window = 100000;
    o.cap = 100000;
    const auto r = pretrain(p, market, o);
    CHECK_FALSE(r.converged);
    CHECK(r.periods == 100000);
  }
}

TEST_CASE("frozen agents never change their table") {
  const auto p = baseline_params();
  PretrainOptions o;
  o.stability_window = 1000;
  o.cap = 200000;
  const auto trained = pretrain(p, LogitMarketParams::baseline(), o);
  QAgent agent(trained.tables[0], p, QMode::Frozen, 1, 3, 3);
  const QTable before = agent.table();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> rival(1.3, 2.1);
  for (int t = 0; t < 1000; ++t) {
    const int state = agent.state();
    const double price = agent.decide();
    CHECK(price == p.grid.points[before.greedy(state)]);
    agent.learn(price, rival(rng), 0.3);
  }
  CHECK(agent.table() == before);
  CHECK(agent.clock() == 0);

  std::mt19937_64 a(1), b(2);
  for (int i = 0; i < 10; ++i)
    CHECK(act(before, QMode::Frozen, 17, i, p, a) == act(before, QMode::Frozen, 17, 5000, p, b));
}

TEST_CASE("adaptive agent drifts to the grid best response against a constant rival") {
  const auto market = LogitMarketParams::baseline();
  auto p = baseline_params(5);
  p.beta = 0.001;
  const double rival = 1.7;
  int best = 0;
  double best_profit = -1.0;
  for (int a = 0; a < 5; ++a) {
    const double pi = market::market_outcome(market, {p.grid.points[a], rival}).profits[0];
    if (pi > best_profit) best_profit = pi, best = a;
  }
  for (std::uint64_t seed : {1, 2, 3}) {
    QAgent agent(initial_table(p, market, QInit::UniformRival), p, QMode::Adaptive, seed, 0, 0);
    for (int t = 0; t < 40000; ++t) {
      const double own = agent.decide();
      agent.learn(own, rival, market::market_outcome(market, {own, rival}).profits[0]);
    }
    // Late play sits in (best, rival) and keeps choosing the best response.
    CHECK(agent.state() == QTable::state_of(best, p.grid.nearest(rival), 5));
    CHECK(agent.table().greedy(agent.state()) == best);
  }
}

TEST_CASE("adaptive play starts fully exploring") {
  const auto p = baseline_params(5);
  QAgent agent(QTable::for_grid(5), p, QMode::Adaptive, 5, 0, 0);
  CHECK(epsilon(agent.clock(), p.beta) == 1.0);
  QAgent resumed(QTable::for_grid(5), p, QMode::Adaptive, 5, 0, 0, 250);
  CHECK(epsilon(resumed.clock(), p.beta) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("table files round-trip") {
  const auto p = baseline_params();
  PretrainOptions o;
  o.stability_window = 500;
  o.cap = 100000;
  o.seed = 12;
  const auto r = pretrain(p, LogitMarketParams::baseline(), o);
  const auto file = temp_file("tables.bin");
  save_tables(file, r);
  const auto back = load_tables(file);
  CHECK(back.tables[0] == r.tables[0]);
  CHECK(back.tables[1] == r.tables[1]);
  CHECK(back.params.grid.points == r.params.grid.points);
  CHECK(back.params.alpha == r.params.alpha);
  CHECK(back.market == r.market);
  CHECK(back.periods == r.periods);
  CHECK(back.converged == r.converged);
  CHECK(back.seed == 12);
  CHECK(back.final_state == r.final_state);

  const auto junk = temp_file("junk.bin");
  std::ofstream(junk) << "not a table";
  CHECK_THROWS_AS(load_tables(junk), FormatError);
  std::filesystem::remove(junk);
  std::filesystem::remove(file);
}
