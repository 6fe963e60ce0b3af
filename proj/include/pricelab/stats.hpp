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


// Condition-level statistics: Welch's one-sided test and report rows.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pricelab/engine.hpp"

namespace pricelab::stats {

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 0.5;  // H1: mean(a) > mean(b)
};

// Throws InsufficientSample when either sample has fewer than two values or
// both have zero variance.
WelchResult welch_t_one_sided(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);  // n - 1 denominator

struct ConditionReport {
  std::string condition;
  int runs = 0;
  int converged = 0;
  // Over converged runs only; SDs absent below two values.
  std::optional<double> rounds_mean;
  std::optional<double> rounds_sd;
  double price_mean = 0.0;
  std::optional<double> price_sd;
  double elevation = 0.0;
  std::vector<double> avg_prices;

  double fraction_converged() const { return runs ? double(converged) / runs : 0.0; }
};

// Throws ContractViolation on an empty list.
ConditionReport summarize_condition(const std::string& condition,
                                    std::span<const engine::RunSummary> summaries,
                                    double p_competitive);

struct ReportRow {
  std::string rounds;     // "195.1 (28.8)" or "Did not converge"
  std::string price;      // "1.801 (0.027)"
  std::string elevation;  // "+22%", "≈ 0%", "−29%"
};

std::string format_elevation(double elevation);
ReportRow render_row(const ConditionReport& report);

}  // namespace pricelab::stats
