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
 * @file synthetic.hpp
 * @brief Seeded urban-grid world and kinematic traffic generator.
 *
 * The grid has blocks_x x blocks_y square blocks, each filled by one building. Roads run
 * along the grid lines and continue past the perimeter as short stub roads where vehicles
 * enter and leave. Every intersection arm carries a crossing between the two sidewalks.
 *
 * Vehicles drive random shortest lane routes between two stubs, slow down for turns, keep
 * a time headway to the vehicle ahead and yield to pedestrians already out on a crossing
 * in their path; they do not react to pedestrians waiting at the curb. Pedestrians walk the
 * sidewalk graph between two random mid-block points and cross roads only on crossings,
 * after a noisy estimate of whether they clear the crossing before the nearest approaching
 * vehicle arrives; when the estimate says no they reroute around the corner. A share of
 * decisions is inattentive and ignores traffic.
 */

#pragma once

#include "p2v/rng.hpp"
#include "p2v/scenario.hpp"
#include "p2v/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace p2v
{

/// Street cross-section and driving constants of the generated world (meters, m/s, s).
struct StreetLayout
{
  double lane_offset{1.5};       // lane centerline, right of the road centerline
  double sidewalk_offset{4.0};   // sidewalk centerline
  double crossing_offset{6.0};   // crossing line, measured from the intersection center
  double building_setback{12.0}; // building faces
  double stub_length{60.0};      // entry/exit roads beyond the perimeter
  double turn_speed{3.5};         // about 2.7 m/s^2 lateral on a right turn
  double headway{2.0};
  double min_gap{6.0};
  double accel{2.0};
  double comfort_decel{3.0};
  double ped_max_trip{1000.0};
  double ped_lookahead{100.0};   // vehicles farther than this from a crossing are ignored
  double reroute_memory{15.0};   // seconds a refused crossing stays penalized
};

struct SyntheticParams
{
  int blocks_x{4};
  int blocks_y{4};
  double block_size{150.0};
  double duration{3600.0};
  /// Traffic runs this long before the first recorded frame, so the trace starts in a
  /// populated steady state (the longest walking trips take about ten minutes). Recorded
  /// times start at 0.
  double warmup{600.0};
  double vehicle_interarrival{7.2};
  double pedestrian_interarrival{7.2};
  double speed_limit{13.89};
  double ped_target_speed{1.6};
  /// Relative error of a pedestrian's estimate of the vehicle arrival time, uniform in
  /// [-noise, +noise].
  double crossing_decision_noise{0.2};
  /// Probability that a crossing decision ignores traffic altogether.
  double inattentive_prob{0.1};
  std::uint64_t seed{1};
  double step{TraceSequence::kDefaultStep};
  StreetLayout layout{};

  /// Throws ConfigError on non-positive values or a layout that does not fit the blocks.
  void validate() const;
};

SyntheticParams synthetic_params_from_json(const nlohmann::json & j);
nlohmann::json to_json(const SyntheticParams & p);
SyntheticParams load_synthetic_params(const std::filesystem::path & path);

/// Grid map only (no traffic): buildings, crossings and bounds.
ScenarioMap build_grid_map(const SyntheticParams & p);

/// Seconds in [0, duration) at which an arrival happens: one Bernoulli(1/interarrival)
/// trial per simulated second.
std::vector<std::int64_t> arrival_seconds(
  rng::Engine & eng, double interarrival, double duration);

/// Normal(1, 0.1) factor clamped to [0.2, 2.0], times the speed limit.
double sample_vehicle_max_speed(rng::Engine & eng, double speed_limit);

/// Target speed reduced by Uniform[0, 0.2] of itself.
double sample_pedestrian_step_speed(rng::Engine & eng, double target);

/// Deterministic in params (seed included). Writes the grid map into map_out.
TraceSequence generate_synthetic(const SyntheticParams & params, ScenarioMap & map_out);

}  // namespace p2v
