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

#include "pricelab/stats.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/distributions/students_t.hpp>

#include "pricelab/errors.hpp"

namespace pricelab::stats {
namespace {

double sample_var(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

std::string with_sd(double value, std::optional<double> sd, int digits) {
  char buf[64];
  if (sd) std::snprintf(buf, sizeof buf, "%.*f (%.*f)", digits, value, digits, *sd);
  else std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ContractViolation("mean of an empty sample");
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientSample("standard deviation needs two values");
  return std::sqrt(sample_var(xs));
}

WelchResult welch_t_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InsufficientSample("Welch test needs n >= 2 per sample");
  const double va = sample_var(a) / static_cast<double>(a.size());
  const double vb = sample_var(b) / static_cast<double>(b.size());
  if (va + vb == 0.0) throw InsufficientSample("both samples have zero variance");
  WelchResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  r.dof = (va + vb) * (va + vb) /
          (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.t));
  return r;
}

ConditionReport summarize_condition(const std::string& condition,
                                    std::span<const engine::RunSummary> summaries,
                                    double p_competitive) {
  if (summaries.empty()) throw ContractViolation("no run summaries");
  ConditionReport report;
  report.condition = condition;
  report.runs = static_cast<int>(summaries.size());
  std::vector<double> rounds;
  for (const auto& s : summaries) {
    report.avg_prices.push_back(s.avg_price);
    if (s.converged && s.rounds_to_convergence) {
      ++report.converged;
      rounds.push_back(*s.rounds_to_convergence);
    }
  }
  if (!rounds.empty()) {
    report.rounds_mean = mean(rounds);
    if (rounds.size() > 1) report.rounds_sd = sample_sd(rounds);
  }
  report.price_mean = mean(report.avg_prices);
  if (report.avg_prices.size() > 1) report.price_sd = sample_sd(report.avg_prices);
  report.elevation = engine::price_elevation(report.price_mean, p_competitive);
  return report;
}

std::string format_elevation(double elevation) {
  const long pct = std::lround(elevation * 100.0);
  if (pct == 0) return "≈ 0%";
  if (pct > 0) return "+" + std::to_string(pct) + "%";
  return "−" + std::to_string(-pct) + "%";
}

ReportRow render_row(const ConditionReport& report) {
  ReportRow row;
  row.rounds = report.rounds_mean ? with_sd(*report.rounds_mean, report.rounds_sd, 1)
                                  : std::string("Did not converge");
  row.price = with_sd(report.price_mean, report.price_sd, 3);
  row.elevation = format_elevation(report.elevation);
  return row;
}

}  // namespace pricelab::stats
