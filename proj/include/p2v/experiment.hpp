// Copyright 2026 The p2vsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/**
 * @file experiment.hpp
 * @brief Experiment grid: (algorithm, th_ad) cells over a set of seeds, with reports.
 *
 * Each seed is one simulation pass that evaluates every cell on the same trace and the
 * same channel outcomes. With a synthetic world the seed also drives the generator; with a
 * recorded trace it only drives beacon phases and losses.
 */

#pragma once

#include "p2v/channel.hpp"
#include "p2v/metrics.hpp"
#include "p2v/simrunner.hpp"
#include "p2v/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace p2v
{

struct RunConfig
{
  // Either a recorded world (both paths set) or a synthetic one.
  std::optional<std::filesystem::path> scenario;
  std::optional<std::filesystem::path> trace;
  std::optional<SyntheticParams> synthetic;
  double trace_step{TraceSequence::kDefaultStep};

  std::vector<int> algorithms{0, 1, 2, 3};
  std::vector<double> th_ad{40.0, 70.0, 100.0};
  double th_ps{10.0};
  double expiry{1.0};
  ChannelConfig channel{};
  std::vector<std::uint64_t> seeds{1};
  DecelerationParams decel{};
  std::filesystem::path out{"out"};
  bool parallel_seeds{true};

  /// Throws ConfigError. Also deduplicates and sorts seeds, algorithms and th_ad.
  void normalize();

  /// Algorithm configs in cell order: algorithm-major, then th_ad.
  std::vector<AlgorithmConfig> cells() const;
};

/// Relative paths inside the document resolve against base_dir. Unknown keys are errors.
RunConfig run_config_from_json(const nlohmann::json & j, const std::filesystem::path & base_dir);
RunConfig load_run_config(const std::filesystem::path & path);
nlohmann::json to_json(const RunConfig & cfg);

struct SeedRun
{
  std::uint64_t seed{0};
  RunResult result;
  std::vector<RunMetrics> metrics;  // parallel to result.configs
  std::size_t vehicles{0};
  std::size_t pedestrians{0};
  double step{TraceSequence::kDefaultStep};
};

struct ExperimentResult
{
  RunConfig config;
  std::vector<SeedRun> runs;  // ascending seed
};

ExperimentResult run_experiment(RunConfig cfg);

/// Report document: resolved config, per-run metrics and per-cell aggregates. A cell with a
/// single run carries means only and "ci_available": false.
nlohmann::json experiment_report(const ExperimentResult & r);

/// Writes report.json plus, per seed, the danger events and per cell the alert log and the
/// deceleration values.
void write_experiment(const ExperimentResult & r, const std::filesystem::path & out_dir);

}  // namespace p2v
