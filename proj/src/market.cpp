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

#include "pricelab/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab::market {

void LogitMarketParams::validate() const {
  if (!(std::isfinite(a) && std::isfinite(mu) && std::isfinite(a0) && std::isfinite(c)))
    throw ContractViolation("logit market parameters must be finite");
  if (!(mu > 0.0)) throw ContractViolation("mu must be positive");
  if (!(c >= 0.0)) throw ContractViolation("marginal cost must be nonnegative");
  if (n < 1) throw ContractViolation("seller count must be >= 1");
}

PriceVector::PriceVector(std::vector<double> prices) : prices_(std::move(prices)) {
  for (double p : prices_) {
    if (!std::isfinite(p) || p < 0.0)
      throw ContractViolation("prices must be finite and nonnegative, got " + std::to_string(p));
  }
}

double PriceVector::min() const { return *std::min_element(prices_.begin(), prices_.end()); }
double PriceVector::max() const { return *std::max_element(prices_.begin(), prices_.end()); }

namespace {

struct Shares {
  std::vector<double> inside;
  double outside;
};

Shares compute_shares(const LogitMarketParams& params, const PriceVector& prices) {
  params.validate();
  if (prices.size() != static_cast<std::size_t>(params.n))
    throw ContractViolation("price vector length " + std::to_string(prices.size()) +
                            " does not match seller count " + std::to_string(params.n));
  const std::size_t n = prices.size();
  std::vector<double> utility(n);
  const double outside_utility = params.a0 / params.mu;
  double top = outside_utility;
  for (std::size_t i = 0; i < n; ++i) {
    utility[i] = (params.a - prices[i]) / params.mu;
    top = std::max(top, utility[i]);
  }
  double total = std::exp(outside_utility - top);
  for (double& u : utility) {
    u = std::exp(u - top);
    total += u;
  }
  for (double& u : utility) u /= total;
  return {std::move(utility), std::exp(outside_utility - top) / total};
}

}  // namespace

std::vector<double> logit_demand(const LogitMarketParams& params, const PriceVector& prices) {
  return compute_shares(params, prices).inside;
}

MarketOutcome market_outcome(const LogitMarketParams& params, const PriceVector& prices) {
  Shares shares = compute_shares(params, prices);
  MarketOutcome out;
  out.profits.resize(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i)
    out.profits[i] = shares.inside[i] * (prices[i] - params.c);
  out.quantities = std::move(shares.inside);
  out.outside_share = shares.outside;
  return out;
}

double discounted_value(std::span<const double> profits, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ContractViolation("discount factor must be in [0, 1)");
  double value = 0.0;
  double weight = 1.0;
  for (double profit : profits) {
    value += weight * profit;
    weight *= delta;
  }
  return value;
}

}  // namespace pricelab::market
