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

#pragma once

#include "p2v/alert_engine.hpp"
#include "p2v/oracle.hpp"
#include "p2v/trace.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2v
{

struct DecelerationTerms
{
  std::optional<double> stop_before_pedestrian;  // 0.5 s^2 / (d_vp - tr s)
  std::optional<double> stop_before_crossing;    // s / (t_pc - tr), t_pc = d_pc / s_ped
};

DecelerationTerms deceleration_terms(
  double vehicle_speed, double vehicle_ped_distance, double ped_crossing_distance,
  double ped_speed, double reaction_time);

/// Braking rate that avoids the pedestrian: the smaller of stopping before the pedestrian's
/// position and stopping before the pedestrian can reach the crossing. nullopt when neither
/// is achievable after the reaction time. A stationary vehicle needs 0.
std::optional<double> required_deceleration(
  double vehicle_speed, double vehicle_ped_distance, double ped_crossing_distance,
  double ped_speed, double reaction_time);

struct DecelerationParams
{
  double reaction_time{0.5};
  double ped_speed{1.6};  // expected maximum walking speed, not the measured one
};

class MetricsError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RunMetrics
{
  double alerts_per_vehicle{0.0};
  double alert_condition_time_per_vehicle{0.0};
  double mean_trigger_distance{0.0};
  std::vector<double> decel_per_alert;  // entry-adjacent alerts excluded
  std::size_t infeasible_decel{0};
  std::size_t alerts{0};
  std::size_t false_negatives{0};
  std::size_t danger_events{0};
  std::size_t vehicles{0};

  double max_decel() const;
};

/// Throws MetricsError when the trace has no vehicles.
RunMetrics run_metrics(
  std::span<const AlertRecord> log, std::span<const DangerEvent> events,
  const TraceSequence & trace, const AlgorithmConfig & cfg, const DecelerationParams & decel = {});

struct Estimate
{
  double mean{0.0};
  double ci95_halfwidth{0.0};
  std::size_t n{0};
};

/// Quantity name -> estimate across runs.
struct AggregateMetrics
{
  std::map<std::string, Estimate> quantities;
};

/// The scalar quantities of a run, by the names used in reports.
std::map<std::string, double> scalar_quantities(const RunMetrics & m);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t_975(std::size_t dof);

Estimate estimate(std::span<const double> values);

/// Mean and t(0.975, N-1) * sd / sqrt(N) per quantity. Throws MetricsError for N < 2.
AggregateMetrics aggregate(std::span<const RunMetrics> runs);

nlohmann::json to_json(const RunMetrics & m);
nlohmann::json to_json(const AggregateMetrics & a);

}  // namespace p2v
