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

// Multinomial-logit Bertrand market shared by every agent family.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pricelab::market {

struct LogitMarketParams {
  double a = 2.0;     // vertical differentiation
  double mu = 0.25;   // price-sensitivity scale
  double a0 = 0.0;    // outside-option value
  double c = 1.0;     // marginal cost
  int n = 2;          // sellers

  void validate() const;

  static LogitMarketParams baseline(int sellers = 2) { return {2.0, 0.25, 0.0, 1.0, sellers}; }
  // Non-default primitives used by the one-shot sanity checks.
  static LogitMarketParams sanity_check(int sellers = 2) { return {4.0, 0.1, 1.0, 3.0, sellers}; }

  friend bool operator==(const LogitMarketParams&, const LogitMarketParams&) = default;
};

// Finite, nonnegative prices, one per seller.
class PriceVector {
 public:
  PriceVector() = default;
  explicit PriceVector(std::vector<double> prices);
  PriceVector(std::initializer_list<double> prices) : PriceVector(std::vector<double>(prices)) {}

  std::size_t size() const { return prices_.size(); }
  double operator[](std::size_t i) const { return prices_[i]; }
  std::span<const double> values() const { return prices_; }
  double min() const;
  double max() const;

  friend bool operator==(const PriceVector&, const PriceVector&) = default;

 private:
  std::vector<double> prices_;
};

struct MarketOutcome {
  std::vector<double> quantities;
  std::vector<double> profits;  // may be negative when a price is below cost
  double outside_share = 0.0;
};

// Shares exp((a - p_i)/mu) / (sum_j exp((a - p_j)/mu) + exp(a0/mu)), evaluated
// after subtracting the largest utility so nothing overflows.
std::vector<double> logit_demand(const LogitMarketParams& params, const PriceVector& prices);

MarketOutcome market_outcome(const LogitMarketParams& params, const PriceVector& prices);

// Sum of delta^t * profit_t over the stream.
double discounted_value(std::span<const double> profits, double delta);

}  // namespace pricelab::market
