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

// Two-seller linear-demand repeated Bertrand game: payoffs, static
// benchmarks and the discount-factor thresholds above which grim-trigger
// collusion at a target price is self-enforcing, with perfect or
// imperfect (stochastic detection) monitoring.

#pragma once

#include <array>
#include <cstdint>

namespace pricelab::theory {

struct LinearMarketParams {
  double a = 2.0;  // demand intercept
  double b = 1.0;  // own-price sensitivity
  double d = 0.5;  // cross-price sensitivity
  double c = 1.0;  // marginal cost

  // Throws ContractViolation unless b > d > 0, a > c(b - d) and c < a / b.
  void validate() const;
};

// Payoffs at the four bang-bang price pairs.
struct PayoffQuad {
  double deviation;    // pi(p*, p_c): undercut a colluding rival
  double collusive;    // pi(p_c, p_c)
  double competitive;  // pi(p*, p*)
  double sucker;       // pi(p_c, p*): undercut while colluding
};

struct MonitoringProfile {
  double rho_1 = 1.0;  // seller 1's probability of detecting a deviation by seller 2
  double rho_2 = 1.0;  // seller 2's probability of detecting a deviation by seller 1
};

struct CollusionScenario {
  LinearMarketParams params;
  double p_c = 2.5;
  double delta_1 = 0.9;
  double delta_2 = 0.9;
};

enum class Signal { Good, Bad };

double linear_demand(const LinearMarketParams& p, double own_price, double rival_price);
double linear_profit(const LinearMarketParams& p, double own_price, double rival_price);

// (a + bc) / (2b - d)
double nash_price_linear(const LinearMarketParams& p);

// Maximizer of (p - c)(a - (b - d)p): (a + (b - d)c) / (2(b - d)).
double monopoly_price_linear(const LinearMarketParams& p);

// Throws OutOfRangeTarget unless p* < p_c <= p^M.
PayoffQuad payoff_quad(const LinearMarketParams& p, double p_c);

// Minimum common discount factor sustaining grim-trigger collusion at p_c
// under perfect monitoring.
double patience_threshold(const LinearMarketParams& p, double p_c);

struct MonitoredThreshold {
  double value;
  // rho == 0: deviations are never punished, so no delta < 1 sustains
  // collusion. value is exactly 1.
  bool degenerate = false;
};

// Threshold for a seller whose deviations are detected with probability
// rho_rival. Throws ContractViolation for rho outside [0, 1].
MonitoredThreshold monitored_threshold(const LinearMarketParams& p, double p_c,
                                       double rho_rival);

// Discounted payoffs (closed form) used by the incentive comparison.
double conform_value(const PayoffQuad& q, double delta);
double deviate_value(const PayoffQuad& q, double delta, double rho_rival);

struct McEstimate {
  std::array<double, 2> mean{};       // per seller
  std::array<double, 2> std_error{};  // standard error of the mean
  int horizon = 0;                    // simulated periods per trial
  double truncation_bound = 0.0;      // max |tail| dropped by the horizon
};

// Smallest horizon T with max(delta_i)^T < 1e-6.
int default_horizon(double delta_1, double delta_2);

// Monte-Carlo estimate of each seller's discounted payoff when both play
// grim trigger against the public signal. With `deviate`, seller 1
// undercuts to p* in period 0 and conforms afterwards; its deviation is
// detected (bad signal) with probability rho.rho_2. horizon <= 0 selects
// default_horizon. Trial k draws from a generator seeded by (seed, k).
McEstimate grim_trigger_mc_oracle(const CollusionScenario& scenario,
                                  const MonitoringProfile& rho, bool deviate,
                                  int horizon, int trials, std::uint64_t seed);

}  // namespace pricelab::theory
