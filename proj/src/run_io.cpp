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

#include "pricelab/run_io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pricelab/config.hpp"
#include "pricelab/errors.hpp"

#ifndef PRICELAB_VERSION
#define PRICELAB_VERSION "0.0.0"
#endif

namespace pricelab::engine {
namespace {

using json = nlohmann::json;

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string run_stem(int run_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03d", run_index);
  return buf;
}

void FileRunSink::begin(const ExperimentSpec&, int run_index, std::uint64_t) {
  std::filesystem::create_directories(dir_);
  stem_ = run_stem(run_index);
  log_ = open_out(dir_ / (stem_ + ".jsonl"));
  io_ = open_out(dir_ / (stem_ + ".io.jsonl"));
  io_lines_ = 0;
  std::filesystem::remove(dir_ / (stem_ + ".abort.json"));
}

void FileRunSink::period(PeriodRecord& record) {
  for (std::size_t i = 0; i < record.outputs.size(); ++i) {
    AgentOutput& out = record.outputs[i];
    if (out.prompt.empty() && out.responses.empty()) continue;
    json line = {{"t", record.t},
                 {"agent", i},
                 {"prompt", out.prompt},
                 {"responses", out.responses},
                 {"latency_ms", out.latency_ms}};
    io_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out.raw_ref = stem_ + ".io.jsonl#" + std::to_string(++io_lines_);
  }
  io_.flush();
  log_ << period_line(record) << '\n';
  log_.flush();
}

void FileRunSink::abort(long long t, const std::string& reason) {
  auto out = open_out(dir_ / (stem_ + ".abort.json"));
  out << json{{"t", t}, {"reason", reason}}.dump(2) << '\n';
}

std::string period_line(const PeriodRecord& record) {
  json agents = json::array();
  for (const auto& out : record.outputs)
    agents.push_back({{"attempts", out.attempts}, {"warnings", out.warnings}, {"raw_ref", out.raw_ref}});
  json line = {{"schema_version", kLogSchemaVersion},
               {"t", record.t},
               {"prices", record.prices},
               {"quantities", record.quantities},
               {"profits", record.profits},
               {"outside_share", record.outside_share},
               {"agents", agents}};
  return line.dump(-1, ' ', false, json::error_handler_t::replace);
}

PeriodRecord parse_period_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    if (j.at("schema_version").get<int>() != kLogSchemaVersion)
      throw FormatError("unsupported log schema_version");
    PeriodRecord record;
    record.t = j.at("t").get<long long>();
    record.prices = j.at("prices").get<std::vector<double>>();
    record.quantities = j.at("quantities").get<std::vector<double>>();
    record.profits = j.at("profits").get<std::vector<double>>();
    record.outside_share = j.at("outside_share").get<double>();
    for (const auto& a : j.at("agents")) {
      AgentOutput out;
      out.attempts = a.at("attempts").get<int>();
      out.warnings = a.at("warnings").get<std::vector<std::string>>();
      out.raw_ref = a.at("raw_ref").get<std::string>();
      record.outputs.push_back(std::move(out));
    }
    return record;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad log line: ") + e.what());
  }
}

RunLog read_run_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  RunLog log;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) log.periods.push_back(parse_period_line(line));
  const auto abort_file = std::filesystem::path(file).replace_extension(".abort.json");
  if (std::filesystem::exists(abort_file)) {
    log.aborted = true;
    std::ifstream a(abort_file);
    log.abort_reason = json::parse(a).value("reason", "");
  }
  return log;
}

void write_manifest(const std::filesystem::path& file, const ExperimentSpec& spec,
                    const equilibrium::Benchmarks& benchmarks) {
  json runs = json::array();
  for (int r = 0; r < spec.runs; ++r) runs.push_back({{"run", r}, {"seed", run_seed(spec.seed, r)}});
  json manifest = {{"version", PRICELAB_VERSION},
                   {"log_schema_version", kLogSchemaVersion},
                   {"spec", config::to_json(spec)},
                   {"runs", runs},
                   {"benchmarks",
                    {{"competitive", benchmarks.competitive.price},
                     {"monopoly", benchmarks.monopoly.price}}}};
  auto out = open_out(file);
  out << manifest.dump(2) << '\n';
}

void write_summary_csv(const std::filesystem::path& file, const std::string& condition,
                       const std::vector<RunSummary>& summaries) {
  auto out = open_out(file);
  out << "condition,run,converged,rounds,avg_price,elevation,terminal_lowest\n";
  for (const auto& s : summaries) {
    out << condition << ',' << s.run_index << ',' << (s.converged ? 1 : 0) << ','
        << (s.rounds_to_convergence ? std::to_string(*s.rounds_to_convergence) : "") << ','
        << fixed(s.avg_price) << ',' << fixed(s.price_elevation) << ','
        << fixed(s.terminal_lowest_price) << '\n';
  }
}

std::vector<RunSummary> read_summary_csv(const std::filesystem::path& file, std::string* condition) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("condition,run,converged,rounds", 0) != 0)
    throw FormatError(file.string() + ": unexpected header");
  std::vector<RunSummary> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 6) cells.emplace_back();
    if (cells.size() != 7) throw FormatError(file.string() + ": bad row '" + line + "'");
    try {
      if (condition) *condition = cells[0];
      RunSummary s;
      s.run_index = std::stoi(cells[1]);
      s.converged = cells[2] == "1";
      if (!cells[3].empty()) s.rounds_to_convergence = std::stoi(cells[3]);
      s.avg_price = std::stod(cells[4]);
      s.price_elevation = std::stod(cells[5]);
      s.terminal_lowest_price = std::stod(cells[6]);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw FormatError(file.string() + ": bad row '" + line + "'");
    }
  }
  return out;
}

ConditionResult run_condition(const ExperimentSpec& spec, int parallelism) {
  spec.validate();
  ConditionResult result;
  result.benchmarks = equilibrium::solve_benchmarks(spec.market);
  const bool persist = !spec.output_dir.empty();
  if (persist) {
    std::filesystem::create_directories(spec.output_dir);
    write_manifest(spec.output_dir / "manifest.json", spec, result.benchmarks);
  }

  std::vector<std::optional<RunSummary>> slots(spec.runs);
  std::vector<std::string> failures(spec.runs);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (int r = next++; r < spec.runs; r = next++) {
      try {
        if (persist) {
          FileRunSink sink(spec.output_dir);
          slots[r] = run(spec, r, &sink).second;
        } else {
          slots[r] = run(spec, r).second;
        }
      } catch (const RunAborted& e) {
        failures[r] = e.what();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(parallelism, 1, spec.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  for (int r = 0; r < spec.runs; ++r) {
    if (slots[r]) result.summaries.push_back(*slots[r]);
    else result.aborted.emplace_back(r, failures[r]);
  }
  if (persist) write_summary_csv(spec.output_dir / "summary.csv", spec.condition, result.summaries);
  return result;
}

}  // namespace pricelab::engine
