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

#include "p2v/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace p2v
{

DecelerationTerms deceleration_terms(
  double s, double d_vp, double d_pc, double ped_speed, double tr)
{
  DecelerationTerms terms;
  const double braking_room = d_vp - tr * s;
  if (braking_room > 0.0) {
    terms.stop_before_pedestrian = 0.5 * s * s / braking_room;
  }
  const double t_pc = d_pc / ped_speed;
  const double braking_time = t_pc - tr;
  if (braking_time > 0.0) {
    terms.stop_before_crossing = std::isinf(braking_time) ? 0.0 : s / braking_time;
  }
  return terms;
}

std::optional<double> required_deceleration(
  double s, double d_vp, double d_pc, double ped_speed, double tr)
{
  if (s == 0.0) {
    return 0.0;
  }
  const DecelerationTerms t = deceleration_terms(s, d_vp, d_pc, ped_speed, tr);
  if (t.stop_before_pedestrian && t.stop_before_crossing) {
    return std::min(*t.stop_before_pedestrian, *t.stop_before_crossing);
  }
  if (t.stop_before_pedestrian) {
    return t.stop_before_pedestrian;
  }
  return t.stop_before_crossing;
}

double RunMetrics::max_decel() const
{
  return decel_per_alert.empty() ? 0.0
                                 : *std::max_element(decel_per_alert.begin(), decel_per_alert.end());
}

RunMetrics run_metrics(
  std::span<const AlertRecord> log, std::span<const DangerEvent> events,
  const TraceSequence & trace, const AlgorithmConfig & cfg, const DecelerationParams & decel)
{
  RunMetrics m;
  std::vector<std::string> vehicles;
  for (const auto & [id, life] : trace.lifetimes()) {
    if (life.kind == EntityKind::vehicle) {
      vehicles.push_back(id);
    }
  }
  m.vehicles = vehicles.size();
  if (m.vehicles == 0) {
    throw MetricsError("run has no vehicles; per-vehicle means are undefined");
  }
  const auto nveh = static_cast<double>(m.vehicles);

  m.alerts = log.size();
  m.alerts_per_vehicle = static_cast<double>(log.size()) / nveh;

  double condition_time = 0.0;
  for (const std::string & v : vehicles) {
    condition_time += total_length(alert_condition_intervals(log, v));
  }
  m.alert_condition_time_per_vehicle = condition_time / nveh;

  if (!log.empty()) {
    double sum = 0.0;
    for (const AlertRecord & r : log) {
      if (!(r.trigger_distance < cfg.th_ad)) {
        throw MetricsError(
          "alert " + r.vehicle_id + "/" + r.pedestrian_id + " triggered beyond th_ad");
      }
      sum += r.trigger_distance;
    }
    m.mean_trigger_distance = sum / static_cast<double>(log.size());
  }

  for (const AlertRecord & r : log) {
    if (r.entry_adjacent) {
      continue;
    }
    const auto d = required_deceleration(
      r.trigger_vehicle_speed, r.trigger_distance, r.trigger_ped_crossing_distance,
      decel.ped_speed, decel.reaction_time);
    if (d) {
      m.decel_per_alert.push_back(*d);
    } else {
      ++m.infeasible_decel;
    }
  }

  m.danger_events = events.size();
  m.false_negatives = coverage_check(events, log).size();
  return m;
}

std::map<std::string, double> scalar_quantities(const RunMetrics & m)
{
  return {
    {"alerts_per_vehicle", m.alerts_per_vehicle},
    {"alert_condition_time_per_vehicle", m.alert_condition_time_per_vehicle},
    {"mean_trigger_distance", m.mean_trigger_distance},
    {"max_decel", m.max_decel()},
    {"infeasible_decel", static_cast<double>(m.infeasible_decel)},
    {"false_negatives", static_cast<double>(m.false_negatives)},
    {"danger_events", static_cast<double>(m.danger_events)},
    {"vehicles", static_cast<double>(m.vehicles)},
  };
}

double student_t_975(std::size_t dof)
{
  if (dof == 0) {
    throw MetricsError("Student t quantile needs at least one degree of freedom");
  }
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

Estimate estimate(std::span<const double> values)
{
  const std::size_t n = values.size();
  if (n < 2) {
    throw MetricsError("a confidence interval needs at least 2 runs");
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, student_t_975(n - 1) * sd / std::sqrt(static_cast<double>(n)), n};
}

AggregateMetrics aggregate(std::span<const RunMetrics> runs)
{
  if (runs.size() < 2) {
    throw MetricsError("aggregate needs at least 2 runs");
  }
  std::map<std::string, std::vector<double>> columns;
  for (const RunMetrics & r : runs) {
    for (const auto & [name, v] : scalar_quantities(r)) {
      columns[name].push_back(v);
    }
  }
  AggregateMetrics out;
  for (auto & [name, values] : columns) {
    // Sorting first makes the sums, and so the report, independent of run order.
    std::sort(values.begin(), values.end());
    out.quantities[name] = estimate(values);
  }
  return out;
}

nlohmann::json to_json(const RunMetrics & m)
{
  nlohmann::json j;
  for (const auto & [name, v] : scalar_quantities(m)) {
    j[name] = v;
  }
  j["alerts"] = m.alerts;
  j["decel_count"] = m.decel_per_alert.size();
  return j;
}

nlohmann::json to_json(const AggregateMetrics & a)
{
  nlohmann::json j = nlohmann::json::object();
  for (const auto & [name, e] : a.quantities) {
    j[name] = {{"mean", e.mean}, {"ci95_halfwidth", e.ci95_halfwidth}, {"n", e.n}};
  }
  return j;
}

}  // namespace p2v
