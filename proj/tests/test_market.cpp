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
#include <numeric>
#include <random>

#include "pricelab/errors.hpp"
#include "pricelab/market.hpp"

using namespace pricelab;
using namespace pricelab::market;

namespace {

double total(const MarketOutcome& o) {
  return std::accumulate(o.quantities.begin(), o.quantities.end(), o.outside_share);
}

}  // namespace

TEST_CASE("parameter presets and validation") {
  const auto base = LogitMarketParams::baseline();
  CHECK(base.a == 2.0);
  CHECK(base.mu == 0.25);
  CHECK(base.a0 == 0.0);
  CHECK(base.c == 1.0);
  CHECK(base.n == 2);
  const auto sanity = LogitMarketParams::sanity_check();
  CHECK(sanity.a == 4.0);
  CHECK(sanity.mu == 0.1);
  CHECK(sanity.a0 == 1.0);
  CHECK(sanity.c == 3.0);
  CHECK_THROWS_AS(LogitMarketParams({2.0, 0.0, 0.0, 1.0, 2}).validate(), ContractViolation);
  CHECK_THROWS_AS(LogitMarketParams({2.0, 0.25, 0.0, -1.0, 2}).validate(), ContractViolation);
  CHECK_THROWS_AS(LogitMarketParams({2.0, 0.25, 0.0, 1.0, 0}).validate(), ContractViolation);
}

TEST_CASE("price vectors reject bad entries") {
  CHECK_THROWS_AS(PriceVector({1.0, -0.5}), ContractViolation);
  CHECK_THROWS_AS(PriceVector({1.0, INFINITY}), ContractViolation);
  CHECK_THROWS_AS(PriceVector({NAN}), ContractViolation);
  const PriceVector p{1.2, 0.8, 1.5};
  CHECK(p.min() == 0.8);
  CHECK(p.max() == 1.5);
  CHECK_THROWS_AS(logit_demand(LogitMarketParams::baseline(2), p), ContractViolation);
}

TEST_CASE("baseline shares and profits") {
  const auto base = LogitMarketParams::baseline();
  const auto at_nash = market_outcome(base, {1.47, 1.47});
  CHECK(at_nash.quantities[0] == doctest::Approx(0.4716910759968862).epsilon(1e-12));
  CHECK(at_nash.quantities[1] == at_nash.quantities[0]);
  CHECK(at_nash.profits[0] == doctest::Approx(0.2216948057185365).epsilon(1e-12));

  const auto collusive = market_outcome(base, {1.8, 1.8});
  CHECK(collusive.quantities[0] == doctest::Approx(0.4082750886671593).epsilon(1e-12));
  CHECK(collusive.profits[0] == doctest::Approx(0.32662007093372747).epsilon(1e-12));
  CHECK(collusive.profits[0] > at_nash.profits[0]);

  const auto at_cost = market_outcome(base, {1.0, 1.6});
  CHECK(at_cost.profits[0] == 0.0);
  const auto below = market_outcome(base, {0.5, 1.6});
  CHECK(below.profits[0] < 0.0);
}

TEST_CASE("symmetry and dominance limits") {
  for (int n = 1; n <= 6; ++n) {
    const auto params = LogitMarketParams::baseline(n);
    const auto q = logit_demand(params, PriceVector(std::vector<double>(n, 1.7)));
    for (double x : q) CHECK(x == doctest::Approx(q[0]).epsilon(1e-15));
  }
  const auto base = LogitMarketParams::baseline(3);
  const auto q = logit_demand(base, {1e6, 1.5, 1.5});
  CHECK(q[0] == 0.0);
  const auto duo = logit_demand(LogitMarketParams::baseline(2), {1.5, 1.5});
  CHECK(q[1] == doctest::Approx(duo[0]).epsilon(1e-12));
}

TEST_CASE("conservation, monotonicity and translation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> price(0.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 5;
    const auto params = trial % 2 ? LogitMarketParams::baseline(n) : LogitMarketParams::sanity_check(n);
    std::vector<double> p(n);
    for (double& x : p) x = price(rng);
    const auto o = market_outcome(params, PriceVector(p));
    CHECK(std::abs(total(o) - 1.0) <= 1e-12);

    auto raised = p;
    raised[0] += 0.05;
    const auto r = logit_demand(params, PriceVector(raised));
    const auto base = o.quantities;
    // Below ~1e-6 the rival shift falls under one ulp of the rival share.
    if (base[0] > 1e-6) {
      CHECK(r[0] < base[0]);
      for (int j = 1; j < n; ++j)
        if (base[j] > 1e-300) CHECK(r[j] > base[j]);
    }

    auto shifted = params;
    shifted.a += 0.7;
    std::vector<double> moved(p);
    for (double& x : moved) x += 0.7;
    const auto s = logit_demand(shifted, PriceVector(moved));
    for (int j = 0; j < n; ++j) CHECK(s[j] == doctest::Approx(base[j]).epsilon(1e-9));
  }
}

TEST_CASE("no overflow at extreme prices") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> price(0.0, 1e6);
  for (double mu : {0.25, 0.1}) {
    LogitMarketParams params{2.0, mu, 0.0, 1.0, 3};
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> p{price(rng), trial % 3 ? price(rng) : 0.0, price(rng) * 1e-6};
      const auto o = market_outcome(params, PriceVector(p));
      for (double x : o.quantities) CHECK(std::isfinite(x));
      for (double x : o.profits) CHECK(std::isfinite(x));
      CHECK(std::abs(total(o) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("discounted value") {
  std::vector<double> ones(200, 1.0);
  CHECK(discounted_value(ones, 0.95) == doctest::Approx(19.999298946675).epsilon(1e-12));
  const std::vector<double> stream{0.7, 5.0, 9.0};
  CHECK(discounted_value(stream, 0.0) == 0.7);
  CHECK(discounted_value({}, 0.95) == 0.0);
  CHECK_THROWS_AS(discounted_value(stream, 1.0), ContractViolation);
}
