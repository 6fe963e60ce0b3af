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

#include "pricelab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pricelab/errors.hpp"

namespace pricelab::equilibrium {
namespace {

constexpr int kScanPoints = 401;
constexpr double kInvPhi = 0.6180339887498949;

struct Refined {
  double x;
  int iterations;
  double width;
};

// Golden-section maximization of f on [lo, hi].
template <typename F>
Refined golden_max(F&& f, double lo, double hi, double tol) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  int iterations = 0;
  while (hi - lo > tol && iterations < 500) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
    ++iterations;
  }
  return {0.5 * (lo + hi), iterations, hi - lo};
}

struct ScanResult {
  double lo, hi;  // neighbourhood of the best grid point
  bool multiple_peaks;
};

template <typename F>
ScanResult scan(F&& f, double lo, double hi) {
  const double step = (hi - lo) / (kScanPoints - 1);
  std::vector<double> values(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) values[k] = f(lo + k * step);
  const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  int peaks = 0;
  for (int k = 1; k + 1 < kScanPoints; ++k) {
    if (values[k] > values[k - 1] && values[k] >= values[k + 1]) ++peaks;
  }
  return {lo + std::max(best - 1, 0) * step, lo + std::min(best + 1, kScanPoints - 1) * step,
          peaks > 1};
}

double refine_tol(const SolverConfig& cfg) { return std::max(cfg.tol * 1e-3, 1e-13); }

}  // namespace

void SolverConfig::validate() const {
  if (!(bracket_lo < bracket_hi)) throw ContractViolation("solver bracket must satisfy lo < hi");
  if (!(tol > 0.0)) throw ContractViolation("solver tolerance must be positive");
  if (max_iter < 1) throw ContractViolation("solver max_iter must be >= 1");
}

SolverConfig SolverConfig::defaults_for(const market::LogitMarketParams& params) {
  SolverConfig cfg;
  cfg.bracket_lo = params.c;
  cfg.bracket_hi = params.a + 5.0 * params.mu;
  return cfg;
}

double own_profit(const market::LogitMarketParams& params, double own_price,
                  std::span<const double> rival_prices) {
  const double own_u = (params.a - own_price) / params.mu;
  const double out_u = params.a0 / params.mu;
  double top = std::max(own_u, out_u);
  for (double p : rival_prices) top = std::max(top, (params.a - p) / params.mu);
  double total = std::exp(out_u - top) + std::exp(own_u - top);
  for (double p : rival_prices) total += std::exp((params.a - p) / params.mu - top);
  return (own_price - params.c) * std::exp(own_u - top) / total;
}

BestResponse best_response(const market::LogitMarketParams& params,
                           std::span<const double> rival_prices, const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  auto f = [&](double p) { return own_profit(params, p, rival_prices); };
  const ScanResult coarse = scan(f, cfg.bracket_lo, cfg.bracket_hi);
  const Refined r = golden_max(f, coarse.lo, coarse.hi, refine_tol(cfg));
  return {r.x, coarse.multiple_peaks};
}

EquilibriumResult nash_logit(const market::LogitMarketParams& params, const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  std::vector<double> rivals(params.n - 1);
  auto respond = [&](double p) {
    std::fill(rivals.begin(), rivals.end(), p);
    return best_response(params, rivals, cfg).price;
  };

  EquilibriumResult result;
  double damping = 1.0;
  double price = 0.5 * (cfg.bracket_lo + cfg.bracket_hi);
  double previous_step = INFINITY;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const double target = respond(price);
    const double step = std::abs(target - price);
    result.iterations = it;
    result.residual = step;
    if (step <= cfg.tol) {
      result.price = target;
      result.converged = true;
      return result;
    }
    if (damping == 1.0 && step >= previous_step) damping = 0.5;  // oscillating
    previous_step = step;
    price += damping * (target - price);
  }
  result.price = price;
  return result;
}

EquilibriumResult monopoly_logit(const market::LogitMarketParams& params, const SolverConfig& cfg) {
  params.validate();
  cfg.validate();
  std::vector<double> rivals(params.n - 1);
  auto joint = [&](double p) {
    std::fill(rivals.begin(), rivals.end(), p);
    return params.n * own_profit(params, p, rivals);
  };
  const ScanResult coarse = scan(joint, cfg.bracket_lo, cfg.bracket_hi);
  const Refined r = golden_max(joint, coarse.lo, coarse.hi, refine_tol(cfg));
  EquilibriumResult result;
  result.price = r.x;
  result.iterations = r.iterations;
  result.residual = r.width;
  result.converged = r.width <= cfg.tol && r.iterations <= cfg.max_iter;
  return result;
}

Benchmarks solve_benchmarks(const market::LogitMarketParams& params) {
  return {nash_logit(params), monopoly_logit(params)};
}

}  // namespace pricelab::equilibrium
