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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "pricelab/errors.hpp"
#include "pricelab/stats.hpp"

using namespace pricelab;
using namespace pricelab::stats;

namespace {

engine::RunSummary summary(bool converged, int rounds, double price) {
  engine::RunSummary s;
  s.converged = converged;
  if (converged) s.rounds_to_convergence = rounds;
  s.avg_price = price;
  return s;
}

}  // namespace

TEST_CASE("Welch test against a reference implementation") {
  const std::vector<double> a{27.5, 21.0, 19.0, 23.6, 17.0};
  const std::vector<double> b{27.1, 22.0, 20.8, 23.4, 23.4};
  const auto r = welch_t_one_sided(a, b);
  CHECK(r.t == doctest::Approx(-0.813168331778168).epsilon(1e-9));
  CHECK(r.dof == doctest::Approx(6.402517409390964).epsilon(1e-9));
  CHECK(std::abs(r.p_value - 0.777349245895399) <= 1e-6);
  const auto flipped = welch_t_one_sided(b, a);
  CHECK(flipped.t == doctest::Approx(-r.t));
  CHECK(flipped.p_value + r.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical samples are uninformative") {
  const std::vector<double> a{1.7, 1.8, 1.75, 1.82};
  const auto r = welch_t_one_sided(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p_value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("clearly separated conditions") {
  // Standardised pattern scaled to the target means and SDs.
  std::vector<double> z{1.3, -0.4, 0.2, -1.1, 0.7, -0.6, 0.9, -1.5, 0.1, 0.4};
  const double m = mean(z), s = sample_sd(z);
  for (double& x : z) x = (x - m) / s;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < z.size(); ++i) {
    a.push_back(1.80 + 0.027 * z[i]);
    b.push_back(1.62 + 0.023 * z[z.size() - 1 - i]);
  }
  CHECK(sample_sd(a) == doctest::Approx(0.027).epsilon(1e-12));
  const auto r = welch_t_one_sided(a, b);
  CHECK(r.t == doctest::Approx(16.048416411483554).epsilon(1e-9));
  CHECK(r.dof == doctest::Approx(17.556257873341195).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(3.1249391165842286e-12).epsilon(1e-4));
  CHECK(r.p_value < 1e-5);
}

TEST_CASE("degenerate samples") {
  const std::vector<double> one{1.8}, two{1.7, 1.9}, flat{1.8, 1.8};
  CHECK_THROWS_AS(welch_t_one_sided(one, two), InsufficientSample);
  CHECK_THROWS_AS(welch_t_one_sided(flat, flat), InsufficientSample);
  CHECK_NOTHROW(welch_t_one_sided(flat, two));
  CHECK_THROWS_AS(sample_sd(one), InsufficientSample);
  CHECK_THROWS_AS(mean(std::vector<double>{}), ContractViolation);
}

TEST_CASE("elevation labels") {
  CHECK(format_elevation(0.2221) == "+22%");
  CHECK(format_elevation(0.004) == "≈ 0%");
  CHECK(format_elevation(-0.004) == "≈ 0%");
  CHECK(format_elevation(-0.29) == "−29%");
  CHECK(format_elevation(0.066) == "+7%");
}

TEST_CASE("report rows") {
  ConditionReport report;
  report.rounds_mean = 195.14;
  report.rounds_sd = 28.76;
  report.price_mean = 1.8012;
  report.price_sd = 0.0271;
  report.elevation = 0.223;
  auto row = render_row(report);
  CHECK(row.rounds == "195.1 (28.8)");
  CHECK(row.price == "1.801 (0.027)");
  CHECK(row.elevation == "+22%");

  report.rounds_mean.reset();
  report.rounds_sd.reset();
  report.price_sd.reset();
  row = render_row(report);
  CHECK(row.rounds == "Did not converge");
  CHECK(row.price == "1.801");
}

TEST_CASE("condition summaries") {
  const double pc = 1.5;
  const std::vector<engine::RunSummary> runs{summary(true, 180, 1.80), summary(true, 210, 1.82),
                                             summary(false, 0, 1.50)};
  const auto report = summarize_condition("c", runs, pc);
  CHECK(report.runs == 3);
  CHECK(report.converged == 2);
  CHECK(report.fraction_converged() == doctest::Approx(2.0 / 3.0));
  CHECK(*report.rounds_mean == 195.0);
  CHECK(*report.rounds_sd == doctest::Approx(std::sqrt(450.0)));
  CHECK(report.price_mean == doctest::Approx(5.12 / 3.0));
  CHECK(report.elevation == doctest::Approx((5.12 / 3.0 - pc) / pc));

  const std::vector<engine::RunSummary> single{summary(true, 150, 1.47)};
  const auto one = summarize_condition("one", single, pc);
  CHECK_FALSE(one.rounds_sd.has_value());
  CHECK_FALSE(one.price_sd.has_value());
  CHECK(render_row(one).rounds == "150.0");

  const std::vector<engine::RunSummary> none{summary(false, 0, 1.2), summary(false, 0, 1.3)};
  CHECK(render_row(summarize_condition("n", none, pc)).rounds == "Did not converge");
  CHECK_THROWS_AS(summarize_condition("e", std::vector<engine::RunSummary>{}, pc), ContractViolation);
}
