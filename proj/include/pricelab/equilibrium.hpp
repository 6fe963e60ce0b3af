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

// Static benchmarks for the logit market: symmetric Nash (competitive) and
// joint-monopoly prices.

#pragma once

#include <span>

#include "pricelab/market.hpp"

namespace pricelab::equilibrium {

struct SolverConfig {
  double bracket_lo = 1.0;
  double bracket_hi = 3.25;
  double tol = 1e-6;
  int max_iter = 10000;

  void validate() const;

  // Bracket [c, a + 5 mu].
  static SolverConfig defaults_for(const market::LogitMarketParams& params);
};

struct EquilibriumResult {
  double price = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct BestResponse {
  double price = 0.0;
  // More than one interior local maximum on the coarse scan; the price is
  // the refined global scan maximum.
  bool non_unimodal = false;
};

// Profit of seller 0 at own_price against fixed rival prices.
double own_profit(const market::LogitMarketParams& params, double own_price,
                  std::span<const double> rival_prices);

// Coarse scan of the bracket followed by golden-section refinement.
BestResponse best_response(const market::LogitMarketParams& params,
                           std::span<const double> rival_prices, const SolverConfig& cfg);

// Symmetric best-response iteration; undamped, retried with 0.5 damping
// when the displacement oscillates. Not converging after max_iter returns
// the last iterate with converged = false.
EquilibriumResult nash_logit(const market::LogitMarketParams& params, const SolverConfig& cfg);
inline EquilibriumResult nash_logit(const market::LogitMarketParams& params) {
  return nash_logit(params, SolverConfig::defaults_for(params));
}

// Common price maximizing joint profit of all n products.
EquilibriumResult monopoly_logit(const market::LogitMarketParams& params, const SolverConfig& cfg);
inline EquilibriumResult monopoly_logit(const market::LogitMarketParams& params) {
  return monopoly_logit(params, SolverConfig::defaults_for(params));
}

struct Benchmarks {
  EquilibriumResult competitive;
  EquilibriumResult monopoly;
};

Benchmarks solve_benchmarks(const market::LogitMarketParams& params);

}  // namespace pricelab::equilibrium
