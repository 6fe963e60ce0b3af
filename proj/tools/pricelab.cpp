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

// pricelab command-line entry point.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pricelab/config.hpp"
#include "pricelab/engine.hpp"
#include "pricelab/equilibrium.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/plot.hpp"
#include "pricelab/qlearning.hpp"
#include "pricelab/run_io.hpp"
#include "pricelab/sanity.hpp"
#include "pricelab/stats.hpp"
#include "pricelab/theory.hpp"

namespace fs = std::filesystem;
using namespace pricelab;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kAgent = 3, kNotConverged = 4 };

struct Profile {
  long long stability_window;
  long long cap;
};

Profile profile_named(const std::string& name) {
  if (name == "desk") return {10'000, 5'000'000};
  if (name == "paper") return {100'000, 1'000'000'000};
  throw ConfigError("unknown profile '" + name + "' (desk|paper)");
}

int cmd_theory(const theory::LinearMarketParams& params, std::optional<double> pc_min,
               std::optional<double> pc_max, int steps, std::vector<double> rhos) {
  params.validate();
  const double nash = theory::nash_price_linear(params);
  const double monopoly = theory::monopoly_price_linear(params);
  const double lo = pc_min.value_or(nash + (monopoly - nash) / steps);
  const double hi = pc_max.value_or(monopoly);
  if (steps < 1) throw ConfigError("--steps must be >= 1");
  theory::payoff_quad(params, lo);
  theory::payoff_quad(params, hi);
  std::sort(rhos.begin(), rhos.end());

  std::printf("# p* = %.6f  p^M = %.6f\n", nash, monopoly);
  std::printf("p_c");
  for (double rho : rhos) std::printf(",rho=%g", rho);
  std::printf("\n");
  int violations = 0;
  std::vector<double> previous(rhos.size(), -1.0);
  for (int k = 0; k <= steps; ++k) {
    const double p_c = lo + (hi - lo) * k / steps;
    std::printf("%.6f", p_c);
    double left = 2.0;
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      const auto th = theory::monitored_threshold(params, p_c, rhos[r]);
      std::printf(",%.9f", th.value);
      if (!th.degenerate) {
        if (previous[r] >= 0.0 && !(th.value > previous[r])) ++violations;
        if (r > 0 && !(th.value < left) && rhos[r] > rhos[r - 1]) ++violations;
      }
      previous[r] = th.value;
      left = th.value;
    }
    std::printf("\n");
  }
  if (violations) {
    std::fprintf(stderr, "monotonicity violations: %d\n", violations);
    return kFailure;
  }
  return kOk;
}

int cmd_solve(const market::LogitMarketParams& params) {
  const auto b = equilibrium::solve_benchmarks(params);
  std::printf("competitive %.6f (iterations %d, residual %.2e)\n", b.competitive.price,
              b.competitive.iterations, b.competitive.residual);
  std::printf("monopoly    %.6f\n", b.monopoly.price);
  return b.competitive.converged ? kOk : kFailure;
}

int cmd_pretrain(const fs::path& config_file, std::optional<std::uint64_t> seed,
                 std::optional<std::string> profile, std::optional<fs::path> out) {
  auto spec = config::load_pretrain(config_file);
  if (seed) spec.options.seed = *seed;
  if (profile) {
    const Profile p = profile_named(*profile);
    spec.options.stability_window = p.stability_window;
    spec.options.cap = p.cap;
  }
  if (out) spec.output = *out;

  const auto bench = equilibrium::solve_benchmarks(spec.market);
  qlearn::QParams params{spec.alpha, spec.beta, spec.delta,
                         qlearn::PriceGrid::around(bench.competitive.price, bench.monopoly.price,
                                                   spec.grid_points, spec.grid_margin)};
  const auto result = qlearn::pretrain(params, spec.market, spec.options);
  if (spec.output.has_parent_path()) fs::create_directories(spec.output.parent_path());
  qlearn::save_tables(spec.output, result);
  const auto play = qlearn::greedy_self_play(result.tables[0], result.tables[1], params.grid,
                                             result.final_state);
  std::printf("converged %s after %lld periods\n", result.converged ? "yes" : "no", result.periods);
  std::printf("greedy self-play price %.6f (cycle %zu), p^C %.6f, elevation %+.1f%%\n",
              play.avg_price, play.cycle.size(), bench.competitive.price,
              100.0 * engine::price_elevation(play.avg_price, bench.competitive.price));
  std::printf("tables written to %s\n", spec.output.string().c_str());
  return kOk;
}

// Pads to `width` display columns (UTF-8 aware).
std::string pad(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char ch : s)
    if ((ch & 0xC0) != 0x80) ++cols;
  return cols >= width ? s : s + std::string(width - cols, ' ');
}

void print_report(const stats::ConditionReport& report) {
  const auto row = stats::render_row(report);
  std::printf("%s %s %s %s %d/%d\n", pad(report.condition, 28).c_str(), pad(row.rounds, 18).c_str(),
              pad(row.price, 16).c_str(), pad(row.elevation, 8).c_str(), report.converged,
              report.runs);
}

void print_header() {
  std::printf("%-28s %-18s %-16s %-8s %s\n", "condition", "rounds (sd)", "avg price (sd)",
              "elev.", "converged");
}

int cmd_run(const fs::path& config_file, std::optional<int> runs, std::optional<std::uint64_t> seed,
            int parallel, std::optional<fs::path> out, bool require_convergence, bool plots) {
  auto spec = config::load_experiment(config_file);
  if (runs) spec.runs = *runs;
  if (seed) spec.seed = *seed;
  if (out) spec.output_dir = *out;
  if (spec.output_dir.empty()) spec.output_dir = fs::path("out") / spec.condition;
  spec.validate();
  config::check_secrets(spec);

  const auto result = engine::run_condition(spec, parallel);
  for (const auto& aborted : result.aborted) std::fprintf(stderr, "%s\n", aborted.second.c_str());

  if (plots) {
    std::vector<std::string> labels;
    for (const auto& a : spec.agents) labels.push_back(a.label);
    for (const auto& s : result.summaries) {
      const std::string stem = engine::run_stem(s.run_index);
      auto log = engine::read_run_log(spec.output_dir / (stem + ".jsonl"));
      plot::write_price_chart(spec.output_dir / (stem + ".svg"), log, labels,
                              result.benchmarks.competitive.price, result.benchmarks.monopoly.price,
                              {spec.condition + " / " + stem});
    }
  }

  if (!result.summaries.empty()) {
    print_header();
    print_report(stats::summarize_condition(spec.condition, result.summaries,
                                            result.benchmarks.competitive.price));
  }
  std::printf("output: %s\n", spec.output_dir.string().c_str());
  if (!result.aborted.empty()) return kAgent;
  if (require_convergence)
    for (const auto& s : result.summaries)
      if (!s.converged) return kNotConverged;
  return kOk;
}

struct LoadedCondition {
  std::string name;
  std::vector<engine::RunSummary> summaries;
  double p_competitive;
};

LoadedCondition load_condition(const fs::path& dir) {
  LoadedCondition c;
  c.summaries = engine::read_summary_csv(dir / "summary.csv", &c.name);
  const auto manifest = config::read_json_file(dir / "manifest.json");
  c.p_competitive = manifest.at("benchmarks").at("competitive").get<double>();
  if (c.name.empty()) c.name = manifest.at("spec").at("condition").get<std::string>();
  return c;
}

int cmd_report(const std::vector<fs::path>& dirs, const std::vector<std::string>& compare) {
  std::map<std::string, LoadedCondition> by_name;
  std::vector<std::string> order;
  print_header();
  for (const auto& dir : dirs) {
    auto c = load_condition(dir);
    if (c.summaries.empty()) {
      std::printf("%-28s (no completed runs)\n", c.name.c_str());
      continue;
    }
    print_report(stats::summarize_condition(c.name, c.summaries, c.p_competitive));
    order.push_back(c.name);
    by_name[c.name] = std::move(c);
  }
  if (compare.empty()) return kOk;
  if (compare.size() != 2) throw ConfigError("--compare takes two condition names");
  for (const auto& name : compare)
    if (!by_name.count(name)) throw ConfigError("unknown condition '" + name + "'");
  auto prices = [&](const std::string& name) {
    std::vector<double> xs;
    for (const auto& s : by_name[name].summaries) xs.push_back(s.avg_price);
    return xs;
  };
  const auto a = prices(compare[0]), b = prices(compare[1]);
  const auto w = stats::welch_t_one_sided(a, b);
  std::printf("Welch one-sided (%s > %s): t = %.4f, dof = %.2f, p = %.3g\n", compare[0].c_str(),
              compare[1].c_str(), w.t, w.dof, w.p_value);
  return kOk;
}

int cmd_sanity(const fs::path& backend_file, int trials, int periods) {
  const auto cfg = config::backend_from_json(config::read_json_file(backend_file),
                                             backend_file.parent_path());
  auto backend = llm::make_backend(cfg);
  const auto params = market::LogitMarketParams::sanity_check(2);
  auto show = [](const char* title, const std::vector<sanity::OneShotTally>& tallies) {
    std::printf("%s\n", title);
    for (const auto& t : tallies)
      std::printf("  %-10s valid %d/%d  correct %d/%d  (optimum %.4f)\n", t.name.c_str(), t.valid,
                  t.trials, t.correct, t.trials, t.benchmark);
  };
  show("one-shot Bertrand", sanity::one_shot_bertrand(*backend, cfg, params, trials));
  show("one-shot monopoly", sanity::one_shot_monopoly(*backend, cfg, params, trials));
  if (periods > 0) {
    const auto spec = sanity::repeated_monopoly_spec(cfg, periods);
    const auto [log, summary] = engine::run(spec, 0);
    const auto report = sanity::check_repeated_monopoly(log, spec.market);
    std::printf("repeated monopoly: final price %.4f, optimum %.4f (%+.2f%%)\n", report.final_price,
                report.benchmark, 100.0 * report.relative_error);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pricelab: repeated-pricing experiments with rule-based, Q-learning and LLM agents"};
  app.require_subcommand(1);

  auto* theory_cmd = app.add_subcommand("theory", "Collusion thresholds for the linear duopoly");
  theory::LinearMarketParams lin;
  std::optional<double> pc_min, pc_max;
  int steps = 10;
  std::vector<double> rhos{0.25, 0.5, 0.75, 1.0};
  theory_cmd->add_option("--a", lin.a, "Demand intercept");
  theory_cmd->add_option("--b", lin.b, "Own-price sensitivity");
  theory_cmd->add_option("--d", lin.d, "Cross-price sensitivity");
  theory_cmd->add_option("--c", lin.c, "Marginal cost");
  theory_cmd->add_option("--pc-min", pc_min, "Smallest collusive price");
  theory_cmd->add_option("--pc-max", pc_max, "Largest collusive price");
  theory_cmd->add_option("--steps", steps, "Grid intervals");
  theory_cmd->add_option("--rho", rhos, "Monitoring precisions")->delimiter(',');

  auto* solve_cmd = app.add_subcommand("solve", "Competitive and monopoly logit benchmarks");
  market::LogitMarketParams logit;
  std::optional<fs::path> solve_config;
  solve_cmd->add_option("--a", logit.a, "Product quality index");
  solve_cmd->add_option("--mu", logit.mu, "Horizontal differentiation");
  solve_cmd->add_option("--a0", logit.a0, "Outside option");
  solve_cmd->add_option("--c", logit.c, "Marginal cost");
  solve_cmd->add_option("--n", logit.n, "Number of sellers");
  solve_cmd->add_option("--config", solve_config, "Experiment config (uses its market)");

  auto* pretrain_cmd = app.add_subcommand("pretrain", "Pre-train two Q-learning agents");
  fs::path pretrain_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<fs::path> out;
  pretrain_cmd->add_option("--config", pretrain_config, "Pretraining config")->required();
  pretrain_cmd->add_option("--seed", seed, "Override the seed");
  pretrain_cmd->add_option("--profile", profile, "desk|paper stopping rule");
  pretrain_cmd->add_option("--out", out, "Q-table output file");

  auto* run_cmd = app.add_subcommand("run", "Run every repetition of one condition");
  fs::path run_config;
  std::optional<int> runs;
  int parallel = 1;
  bool require_convergence = false, no_plots = false;
  run_cmd->add_option("--config", run_config, "Experiment config")->required();
  run_cmd->add_option("--runs", runs, "Override the number of runs");
  run_cmd->add_option("--seed", seed, "Override the base seed");
  run_cmd->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--profile", profile, "Accepted for symmetry; only pretrain uses it");
  run_cmd->add_flag("--require-convergence", require_convergence,
                    "Exit 4 when any run fails to converge");
  run_cmd->add_flag("--no-plots", no_plots, "Skip SVG charts");

  auto* report_cmd = app.add_subcommand("report", "Summarize condition directories");
  std::vector<fs::path> dirs;
  std::vector<std::string> compare;
  report_cmd->add_option("dirs", dirs, "Condition output directories")->required();
  report_cmd->add_option("--compare", compare, "Two condition names: one-sided Welch test A > B")
      ->expected(2);

  auto* sanity_cmd = app.add_subcommand("sanity", "One-shot and repeated-monopoly LLM checks");
  fs::path backend_file;
  int trials = 50, periods = 300;
  sanity_cmd->add_option("--backend", backend_file, "Backend config (JSON)")->required();
  sanity_cmd->add_option("--trials", trials, "One-shot trials");
  sanity_cmd->add_option("--periods", periods, "Repeated monopoly periods (0 skips)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*theory_cmd) return cmd_theory(lin, pc_min, pc_max, steps, rhos);
    if (*solve_cmd) {
      if (solve_config) logit = config::load_experiment(*solve_config).market;
      logit.validate();
      return cmd_solve(logit);
    }
    if (*pretrain_cmd) return cmd_pretrain(pretrain_config, seed, profile, out);
    if (*run_cmd) {
      if (profile) profile_named(*profile);
      return cmd_run(run_config, runs, seed, parallel, out, require_convergence, !no_plots);
    }
    if (*report_cmd) return cmd_report(dirs, compare);
    if (*sanity_cmd) return cmd_sanity(backend_file, trials, periods);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const OutOfRangeTarget& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kConfig;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kConfig;
  } catch (const AgentFailure& e) {
    std::fprintf(stderr, "agent failure: %s\n", e.what());
    return kAgent;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
