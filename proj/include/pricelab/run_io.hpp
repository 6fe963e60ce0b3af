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


// Run persistence: per-run JSON-lines logs with prompt/response sidecars,
// condition manifests and summary CSVs, plus the multi-run driver.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pricelab/engine.hpp"

namespace pricelab::engine {

inline constexpr int kLogSchemaVersion = 1;

class RunSink {
 public:
  virtual ~RunSink() = default;
  virtual void begin(const ExperimentSpec& spec, int run_index, std::uint64_t seed) = 0;
  virtual void period(PeriodRecord& record) = 0;
  virtual void abort(long long t, const std::string& reason) = 0;
  virtual void end(const RunSummary& summary) = 0;
};

// run_NNN.jsonl:     one period per line, no timing data (byte-stable).
// run_NNN.io.jsonl:  prompt, every reply and latency per LLM decision.
// run_NNN.abort.json written only when the run aborts.
class FileRunSink final : public RunSink {
 public:
  explicit FileRunSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void begin(const ExperimentSpec& spec, int run_index, std::uint64_t seed) override;
  void period(PeriodRecord& record) override;
  void abort(long long t, const std::string& reason) override;
  void end(const RunSummary&) override {}

 private:
  std::filesystem::path dir_;
  std::string stem_;
  std::ofstream log_;
  std::ofstream io_;
  long long io_lines_ = 0;
};

std::string run_stem(int run_index);  // "run_007"

// One log line, as written by FileRunSink.
std::string period_line(const PeriodRecord& record);
PeriodRecord parse_period_line(const std::string& line);
RunLog read_run_log(const std::filesystem::path& file);

struct ConditionResult {
  equilibrium::Benchmarks benchmarks;
  std::vector<RunSummary> summaries;  // completed runs, by run index
  std::vector<std::pair<int, std::string>> aborted;
};

// Runs spec.runs independent runs on up to `parallelism` threads. With a
// non-empty spec.output_dir, writes the run files, manifest.json and
// summary.csv there.
ConditionResult run_condition(const ExperimentSpec& spec, int parallelism = 1);

void write_manifest(const std::filesystem::path& file, const ExperimentSpec& spec,
                    const equilibrium::Benchmarks& benchmarks);
void write_summary_csv(const std::filesystem::path& file, const std::string& condition,
                       const std::vector<RunSummary>& summaries);
std::vector<RunSummary> read_summary_csv(const std::filesystem::path& file,
                                         std::string* condition = nullptr);

}  // namespace pricelab::engine
