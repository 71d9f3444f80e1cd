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

// Ground-truth danger detection from true positions, plus false-negative accounting.

#pragma once

#include "p2v/alert_engine.hpp"
#include "p2v/scenario.hpp"
#include "p2v/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace p2v
{

struct DangerThresholds
{
  double crossing_margin{1.0};  // pedestrian within this of a crossing span
  double close_distance{5.0};   // vehicle strictly closer than this
};

struct DangerPair
{
  std::string vehicle_id;
  std::string pedestrian_id;
  double distance{0.0};

  friend bool operator==(const DangerPair &, const DangerPair &) = default;
};

struct DangerEvent
{
  std::string vehicle_id;
  std::string pedestrian_id;
  double t_start{0.0};
  double t_end{0.0};
  double min_distance{0.0};
  std::int64_t start_tick{0};
  std::int64_t end_tick{0};

  friend bool operator==(const DangerEvent &, const DangerEvent &) = default;
};

/// Pairs in danger at cur.t, sorted by (vehicle, pedestrian). A pair needs to be present in
/// both frames; the distance must be below close_distance and strictly smaller than before.
/// OpenMP-parallel over pedestrians.
std::vector<DangerPair> detect_danger(
  const Frame & prev, const Frame & cur, const ScenarioMap & map, const DangerThresholds & th = {});

namespace serial
{

std::vector<DangerPair> detect_danger(
  const Frame & prev, const Frame & cur, const ScenarioMap & map, const DangerThresholds & th = {});

}  // namespace serial

/// Merges per-step flags into episodes; a missing step ends an episode.
class DangerTracker
{
public:
  void add(std::int64_t tick, double t, std::span<const DangerPair> flagged);
  /// Closes the open episodes and returns all events sorted by (start, vehicle, pedestrian).
  std::vector<DangerEvent> finish();

private:
  using Key = std::pair<std::string, std::string>;
  std::map<Key, DangerEvent> open_;
  std::vector<DangerEvent> done_;
};

struct FlaggedStep
{
  std::int64_t tick{0};
  double t{0.0};
  std::vector<DangerPair> pairs;
};

std::vector<DangerEvent> coalesce(std::span<const FlaggedStep> steps);

/// Events with no same-pair alert whose [active_since, end) overlaps [t_start, t_end].
std::vector<DangerEvent> coverage_check(
  std::span<const DangerEvent> events, std::span<const AlertRecord> log);

void write_danger_events(std::span<const DangerEvent> events, std::ostream & out);

}  // namespace p2v
