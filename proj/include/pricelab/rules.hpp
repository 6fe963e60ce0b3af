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

// Deterministic reference agents: grim trigger (optionally with stochastic
// detection), constant price, and scripted trajectories.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace pricelab::rules {

struct GrimTriggerConfig {
  double p_collusive = 1.92;
  double p_competitive = 1.47;
  double rho_detect = 1.0;  // 1 = perfect monitoring

  void validate() const;
};

// Rival prices within this distance of p_collusive count as conforming.
inline constexpr double kDeviationTolerance = 1e-9;

// Public bad/good signal shared by every grim-trigger agent wired to it.
// The draw for a period happens once, on first request; later requests for
// the same period return the memoized outcome.
class PublicSignal {
 public:
  explicit PublicSignal(std::uint64_t seed) : rng_(seed) {}

  // True when period t's deviations (if any) were detected. detect[j] is the
  // probability that seller j's deviation is detected.
  bool bad(long long t, std::span<const double> prices, double p_collusive,
           std::span<const double> detect);

 private:
  std::mt19937_64 rng_;
  std::vector<char> outcomes_;
};

class GrimTriggerAgent {
 public:
  // Private monitoring: this agent draws its own detection events.
  GrimTriggerAgent(GrimTriggerConfig cfg, std::uint64_t seed);
  // Public monitoring: all agents share `signal`; detect holds every
  // seller's detection probability by the others, indexed by seller.
  GrimTriggerAgent(GrimTriggerConfig cfg, std::shared_ptr<PublicSignal> signal,
                   std::vector<double> detect, int self);

  // Price for period t given last period's own and rival prices (empty at t = 0).
  double act(long long t, std::span<const double> last_prices, int self);

  bool triggered() const { return triggered_; }
  const GrimTriggerConfig& config() const { return cfg_; }

 private:
  GrimTriggerConfig cfg_;
  std::mt19937_64 rng_;
  std::shared_ptr<PublicSignal> signal_;
  std::vector<double> detect_;
  bool triggered_ = false;
};

struct ScriptedAgent {
  std::vector<double> trajectory;
  bool hold_last = true;

  void validate() const;
};

// trajectory[t]; past the end the last price if hold_last, else ScriptExhausted.
double scripted_act(const ScriptedAgent& agent, long long t);

}  // namespace pricelab::rules
