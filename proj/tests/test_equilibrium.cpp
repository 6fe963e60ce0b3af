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

#include "pricelab/equilibrium.hpp"
#include "pricelab/errors.hpp"

using namespace pricelab;
using namespace pricelab::equilibrium;
using market::LogitMarketParams;

namespace {

// Exhaustive 1e-3 grid: symmetric profile whose grid best response is
// closest to itself.
double grid_nash(const LogitMarketParams& params) {
  const double lo = params.c, hi = params.a + 5.0 * params.mu, step = 1e-3;
  const int points = static_cast<int>((hi - lo) / step);
  double best = lo, best_gap = 1e9;
  for (int i = 0; i <= points; ++i) {
    const double p = lo + i * step;
    const std::vector<double> rivals(params.n - 1, p);
    double br = lo, br_value = -1e9;
    for (int k = 0; k <= points; ++k) {
      const double own = lo + k * step;
      const double v = own_profit(params, own, rivals);
      if (v > br_value) br_value = v, br = own;
    }
    if (std::abs(br - p) < best_gap) best_gap = std::abs(br - p), best = p;
  }
  return best;
}

double grid_monopoly(const LogitMarketParams& params) {
  const double lo = params.c, hi = params.a + 5.0 * params.mu, step = 1e-4;
  double best = lo, best_value = -1e9;
  for (double p = lo; p <= hi; p += step) {
    const auto o = market::market_outcome(params, market::PriceVector(std::vector<double>(params.n, p)));
    double joint = 0.0;
    for (double x : o.profits) joint += x;
    if (joint > best_value) best_value = joint, best = p;
  }
  return best;
}

}  // namespace

TEST_CASE("solver config") {
  const auto cfg = SolverConfig::defaults_for(LogitMarketParams::baseline());
  CHECK(cfg.bracket_lo == 1.0);
  CHECK(cfg.bracket_hi == 3.25);
  CHECK_THROWS_AS(SolverConfig({2.0, 1.0, 1e-6, 10}).validate(), ContractViolation);
  CHECK_THROWS_AS(SolverConfig({1.0, 2.0, 0.0, 10}).validate(), ContractViolation);
  CHECK_THROWS_AS(SolverConfig({1.0, 2.0, 1e-6, 0}).validate(), ContractViolation);
}

TEST_CASE("baseline benchmarks") {
  const auto b = solve_benchmarks(LogitMarketParams::baseline());
  CHECK(b.competitive.converged);
  CHECK(b.competitive.price == doctest::Approx(1.47).epsilon(0.01 / 1.47));
  CHECK(b.monopoly.price == doctest::Approx(1.92).epsilon(0.01 / 1.92));
  CHECK(b.competitive.residual <= 1e-6);
  CHECK(b.competitive.price == doctest::Approx(1.472927).epsilon(1e-6));
  CHECK(b.monopoly.price == doctest::Approx(1.924981).epsilon(1e-6));
}

TEST_CASE("best response fixed point and limits") {
  const auto params = LogitMarketParams::baseline();
  const auto cfg = SolverConfig::defaults_for(params);
  const auto nash = nash_logit(params);
  const std::vector<double> at_nash{nash.price};
  const auto br = best_response(params, at_nash, cfg);
  CHECK(std::abs(br.price - nash.price) <= 1e-6);
  CHECK_FALSE(br.non_unimodal);

  const std::vector<double> far{1e6};
  const auto lone = best_response(params, far, cfg);
  const auto single = monopoly_logit({2.0, 0.25, 0.0, 1.0, 1});
  CHECK(lone.price == doctest::Approx(single.price).epsilon(1e-5));

  const auto sanity = LogitMarketParams::sanity_check();
  const auto sanity_nash = nash_logit(sanity);
  const std::vector<double> rival{sanity_nash.price};
  CHECK(std::abs(best_response(sanity, rival, SolverConfig::defaults_for(sanity)).price -
                 sanity_nash.price) <= 1e-6);
}

TEST_CASE("single seller Nash equals monopoly") {
  const LogitMarketParams one{2.0, 0.25, 0.0, 1.0, 1};
  CHECK(nash_logit(one).price == doctest::Approx(monopoly_logit(one).price).epsilon(1e-6));
}

TEST_CASE("grid oracle agreement") {
  for (int n = 2; n <= 5; ++n) {
    const auto params = LogitMarketParams::baseline(n);
    const auto b = solve_benchmarks(params);
    CAPTURE(n);
    CHECK(std::abs(b.competitive.price - grid_nash(params)) <= 2e-3);
    CHECK(std::abs(b.monopoly.price - grid_monopoly(params)) <= 2e-3);
    CHECK(b.monopoly.price >= b.competitive.price);
    CHECK(b.competitive.price >= params.c);
  }
  const auto sanity = LogitMarketParams::sanity_check();
  const auto b = solve_benchmarks(sanity);
  CHECK(std::abs(b.competitive.price - grid_nash(sanity)) <= 2e-3);
  CHECK(std::abs(b.monopoly.price - grid_monopoly(sanity)) <= 2e-3);
}

TEST_CASE("benchmarks converge as demand flattens") {
  double previous_gap = 1e9;
  for (double mu : {0.25, 1.0, 4.0}) {
    const auto b = solve_benchmarks({2.0, mu, 0.0, 1.0, 2});
    const double gap = (b.monopoly.price - b.competitive.price) / b.monopoly.price;
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
}

TEST_CASE("solver is deterministic") {
  const auto params = LogitMarketParams::baseline(4);
  const auto a = nash_logit(params), b = nash_logit(params);
  CHECK(a.price == b.price);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("iteration cap reports non-convergence") {
  auto cfg = SolverConfig::defaults_for(LogitMarketParams::baseline());
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  const auto r = nash_logit(LogitMarketParams::baseline(), cfg);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.price));
}
