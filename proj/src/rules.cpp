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

#include "pricelab/rules.hpp"

#include <cmath>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab::rules {
namespace {

bool deviates(double price, double p_collusive) {
  return std::abs(price - p_collusive) > kDeviationTolerance;
}

}  // namespace

void GrimTriggerConfig::validate() const {
  if (!(p_competitive < p_collusive))
    throw ContractViolation("grim trigger requires p_competitive < p_collusive");
  if (!(rho_detect >= 0.0 && rho_detect <= 1.0))
    throw ContractViolation("detection probability must lie in [0, 1]");
}

bool PublicSignal::bad(long long t, std::span<const double> prices, double p_collusive,
                       std::span<const double> detect) {
  if (t < 0) throw ContractViolation("negative period");
  const auto idx = static_cast<std::size_t>(t);
  if (idx < outcomes_.size() && outcomes_[idx] >= 0) return outcomes_[idx] == 1;
  if (outcomes_.size() <= idx) outcomes_.resize(idx + 1, -1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool detected = false;
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (deviates(prices[j], p_collusive) && unit(rng_) < detect[j]) detected = true;
  }
  outcomes_[idx] = detected ? 1 : 0;
  return detected;
}

GrimTriggerAgent::GrimTriggerAgent(GrimTriggerConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
}

GrimTriggerAgent::GrimTriggerAgent(GrimTriggerConfig cfg, std::shared_ptr<PublicSignal> signal,
                                   std::vector<double> detect, int self)
    : cfg_(cfg), rng_(0), signal_(std::move(signal)), detect_(std::move(detect)) {
  cfg_.validate();
  if (!signal_) throw ContractViolation("public signal required");
  if (self < 0 || static_cast<std::size_t>(self) >= detect_.size())
    throw ContractViolation("seller index outside detection profile");
}

double GrimTriggerAgent::act(long long t, std::span<const double> last_prices, int self) {
  if (t == 0 || triggered_) return triggered_ ? cfg_.p_competitive : cfg_.p_collusive;
  if (signal_) {
    triggered_ = signal_->bad(t - 1, last_prices, cfg_.p_collusive, detect_);
  } else {
    // Own off-path play is always known; rival deviations are caught with rho.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < last_prices.size() && !triggered_; ++j) {
      if (!deviates(last_prices[j], cfg_.p_collusive)) continue;
      if (static_cast<int>(j) == self) {
        triggered_ = true;
      } else if (cfg_.rho_detect >= 1.0 || unit(rng_) < cfg_.rho_detect) {
        triggered_ = true;
      }
    }
  }
  return triggered_ ? cfg_.p_competitive : cfg_.p_collusive;
}

void ScriptedAgent::validate() const {
  if (trajectory.empty()) throw ContractViolation("scripted trajectory must be nonempty");
  for (double p : trajectory)
    if (!(std::isfinite(p) && p > 0.0)) throw ContractViolation("scripted prices must be positive");
}

double scripted_act(const ScriptedAgent& agent, long long t) {
  if (t < 0) throw ContractViolation("negative period");
  const auto idx = static_cast<std::size_t>(t);
  if (idx < agent.trajectory.size()) return agent.trajectory[idx];
  if (agent.hold_last && !agent.trajectory.empty()) return agent.trajectory.back();
  throw ScriptExhausted("script of length " + std::to_string(agent.trajectory.size()) +
                        " exhausted at period " + std::to_string(t));
}

}  // namespace pricelab::rules
