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

#include "pricelab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab::theory {
namespace {

// Relative slack on the p_c <= p^M check so that p_c = monopoly_price_linear()
// passes after round-off.
constexpr double kUpperSlack = 1e-12;

void check_target(const LinearMarketParams& p, double p_c) {
  const double lo = nash_price_linear(p);
  const double hi = monopoly_price_linear(p);
  if (!std::isfinite(p_c) || !(p_c > lo) || p_c > hi * (1.0 + kUpperSlack)) {
    throw OutOfRangeTarget("target price " + std::to_string(p_c) +
                           " outside (" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
}

}  // namespace

void LinearMarketParams::validate() const {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(d) && std::isfinite(c)))
    throw ContractViolation("linear market parameters must be finite");
  if (!(b > d && d > 0.0)) throw ContractViolation("require b > d > 0");
  if (!(a > c * (b - d))) throw ContractViolation("require a > c(b - d)");
  if (!(c < a / b)) throw ContractViolation("require c < a / b");
}

double linear_demand(const LinearMarketParams& p, double own_price, double rival_price) {
  if (!std::isfinite(own_price) || !std::isfinite(rival_price) || own_price < 0.0 || rival_price < 0.0)
    throw ContractViolation("prices must be finite and nonnegative");
  return p.a - p.b * own_price + p.d * rival_price;
}

double linear_profit(const LinearMarketParams& p, double own_price, double rival_price) {
  return (own_price - p.c) * linear_demand(p, own_price, rival_price);
}

double nash_price_linear(const LinearMarketParams& p) {
  p.validate();
  return (p.a + p.b * p.c) / (2.0 * p.b - p.d);
}

double monopoly_price_linear(const LinearMarketParams& p) {
  p.validate();
  const double slope = p.b - p.d;
  return (p.a + slope * p.c) / (2.0 * slope);
}

PayoffQuad payoff_quad(const LinearMarketParams& p, double p_c) {
  check_target(p, p_c);
  const double p_star = nash_price_linear(p);
  return PayoffQuad{
      .deviation = linear_profit(p, p_star, p_c),
      .collusive = linear_profit(p, p_c, p_c),
      .competitive = linear_profit(p, p_star, p_star),
      .sucker = linear_profit(p, p_c, p_star),
  };
}

double patience_threshold(const LinearMarketParams& p, double p_c) {
  const PayoffQuad q = payoff_quad(p, p_c);
  return (q.deviation - q.collusive) / (q.deviation - q.competitive);
}

MonitoredThreshold monitored_threshold(const LinearMarketParams& p, double p_c,
                                       double rho_rival) {
  if (!(rho_rival >= 0.0 && rho_rival <= 1.0))
    throw ContractViolation("detection probability must lie in [0, 1]");
  const PayoffQuad q = payoff_quad(p, p_c);
  if (rho_rival == 0.0) return {1.0, true};
  const double gain = q.deviation - q.collusive;
  return {gain / (gain + rho_rival * (q.collusive - q.competitive)), false};
}

double conform_value(const PayoffQuad& q, double delta) {
  return q.collusive / (1.0 - delta);
}

double deviate_value(const PayoffQuad& q, double delta, double rho_rival) {
  return q.deviation + delta / (1.0 - delta) *
                           (rho_rival * q.competitive + (1.0 - rho_rival) * q.collusive);
}

int default_horizon(double delta_1, double delta_2) {
  const double delta = std::max(delta_1, delta_2);
  if (delta <= 0.0) return 1;
  // delta^T < 1e-6
  return static_cast<int>(std::floor(std::log(1e-6) / std::log(delta))) + 1;
}

McEstimate grim_trigger_mc_oracle(const CollusionScenario& scenario,
                                  const MonitoringProfile& rho, bool deviate,
                                  int horizon, int trials, std::uint64_t seed) {
  const auto& params = scenario.params;
  check_target(params, scenario.p_c);
  for (double delta : {scenario.delta_1, scenario.delta_2})
    if (!(delta >= 0.0 && delta < 1.0)) throw ContractViolation("discount factor must lie in [0, 1)");
  for (double r : {rho.rho_1, rho.rho_2})
    if (!(r >= 0.0 && r <= 1.0)) throw ContractViolation("detection probability must lie in [0, 1]");
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  if (horizon <= 0) horizon = default_horizon(scenario.delta_1, scenario.delta_2);

  const double p_star = nash_price_linear(params);
  const std::array<double, 2> delta{scenario.delta_1, scenario.delta_2};
  // Seller j's deviation is seen by the other seller.
  const std::array<double, 2> detect{rho.rho_2, rho.rho_1};

  // Welford accumulators per seller.
  std::array<double, 2> mean{}, m2{};
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    bool punished = false;
    std::array<double, 2> value{}, weight{1.0, 1.0};
    for (int t = 0; t < horizon; ++t) {
      std::array<double, 2> price{scenario.p_c, scenario.p_c};
      if (punished) {
        price = {p_star, p_star};
      } else if (deviate && t == 0) {
        price[0] = p_star;
      }
      value[0] += weight[0] * linear_profit(params, price[0], price[1]);
      value[1] += weight[1] * linear_profit(params, price[1], price[0]);
      weight[0] *= delta[0];
      weight[1] *= delta[1];

      if (!punished) {
        // No false alarms: the signal can only turn bad after a deviation.
        Signal signal = Signal::Good;
        for (int j = 0; j < 2; ++j) {
          if (price[j] != scenario.p_c && unit(rng) < detect[j]) signal = Signal::Bad;
        }
        punished = signal == Signal::Bad;
      }
    }
    for (int i = 0; i < 2; ++i) {
      const double diff = value[i] - mean[i];
      mean[i] += diff / (trial + 1);
      m2[i] += diff * (value[i] - mean[i]);
    }
  }

  const PayoffQuad q = payoff_quad(params, scenario.p_c);
  const double max_abs = std::max({std::abs(q.deviation), std::abs(q.collusive),
                                   std::abs(q.competitive), std::abs(q.sucker)});
  McEstimate est;
  est.horizon = horizon;
  for (int i = 0; i < 2; ++i) {
    est.mean[i] = mean[i];
    const double var = trials > 1 ? m2[i] / (trials - 1) : 0.0;
    est.std_error[i] = std::sqrt(var / trials);
    const double tail = std::pow(delta[i], horizon) / (1.0 - delta[i]) * max_abs;
    est.truncation_bound = std::max(est.truncation_bound, tail);
  }
  return est;
}

}  // namespace pricelab::theory
