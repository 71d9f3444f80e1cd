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

#include "p2v/alert_engine.hpp"

#include "p2v/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace p2v
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grid times are tick * step; this only absorbs the rounding of that product.
constexpr double kTimeSlack = 1e-9;

}  // namespace

void AlgorithmConfig::validate(double beacon_period) const
{
  if (algorithm < 0 || algorithm > 3) {
    throw ConfigError("algorithm must be 0, 1, 2 or 3");
  }
  if (!(th_ad > 0.0)) {
    throw ConfigError("th_ad must be positive");
  }
  if (!(th_ps > 0.0)) {
    throw ConfigError("th_ps must be positive");
  }
  if (!(expiry >= beacon_period)) {
    throw ConfigError("expiry must be at least the beacon period");
  }
}

const char * to_string(EndCause c)
{
  switch (c) {
    case EndCause::expired:
      return "expired";
    case EndCause::vehicle_exit:
      return "vehicle_exit";
    case EndCause::pedestrian_exit:
      return "pedestrian_exit";
    case EndCause::simulation_end:
      return "simulation_end";
  }
  return "unknown";
}

ConditionResult evaluate_condition(
  const AlgorithmConfig & cfg, const EntityState & vehicle, Point ped_pos, const ScenarioMap & map)
{
  ConditionResult r;
  if (!(distance(vehicle.pos, ped_pos) < cfg.th_ad)) {
    return r;
  }
  if (cfg.algorithm == 0) {
    const auto nearest = map.nearest_crossing(ped_pos);
    r.met = true;
    r.ped_crossing_distance = nearest ? nearest->distance : kInf;
    return r;
  }
  if (cfg.algorithm == 3 && !is_in_front(vehicle.pos, vehicle.heading, ped_pos)) {
    return r;
  }

  double best_ped_crossing = kInf;
  for (const CrossingHit & hit : map.crossings_within(vehicle.pos, cfg.th_ad)) {
    if (!(hit.distance < cfg.th_ad)) {
      continue;
    }
    if (cfg.algorithm == 1) {
      r.met = true;
      break;
    }
    const Point nearest = closest_point_on_segment(vehicle.pos, hit.crossing->span);
    if (!is_in_front(vehicle.pos, vehicle.heading, nearest)) {
      continue;
    }
    if (cfg.algorithm == 2) {
      r.met = true;
      break;
    }
    const double d_pc = distance_to_segment(ped_pos, hit.crossing->span);
    if (d_pc < cfg.th_ps) {
      r.met = true;
      best_ped_crossing = std::min(best_ped_crossing, d_pc);
    }
  }
  if (!r.met) {
    return r;
  }
  if (cfg.algorithm == 3) {
    r.ped_crossing_distance = best_ped_crossing;
  } else {
    const auto nearest = map.nearest_crossing(ped_pos);
    r.ped_crossing_distance = nearest ? nearest->distance : kInf;
  }
  return r;
}

AlertEngine::AlertEngine(AlgorithmConfig cfg, const ScenarioMap & map, const TraceSequence & trace)
: cfg_(cfg), map_(&map), trace_(&trace)
{
}

bool AlertEngine::is_active(const std::string & vehicle_id, const std::string & pedestrian_id) const
{
  return active_.count({vehicle_id, pedestrian_id}) > 0;
}

void AlertEngine::close(std::map<Key, AlertState>::iterator it, double end, EndCause cause)
{
  AlertRecord rec;
  static_cast<AlertState &>(rec) = std::move(it->second);
  rec.algorithm = cfg_.algorithm;
  rec.end = end;
  rec.end_cause = cause;
  const std::int64_t later_entry = std::max(
    trace_->lifetime(rec.vehicle_id).entry_tick, trace_->lifetime(rec.pedestrian_id).entry_tick);
  rec.entry_adjacent =
    static_cast<double>(rec.since_tick - later_entry) * trace_->step() <= kEntryWindow + kTimeSlack;
  closed_.push_back(std::move(rec));
  active_.erase(it);
}

std::vector<AlertEvent> AlertEngine::process_frame(
  const Frame & frame, std::span<const DeliveredBeacon> delivered)
{
  std::vector<AlertEvent> events;
  // A timer that ran out since the last step fires before this step's beacons are read.
  const double step = trace_->step();
  for (auto it = active_.begin(); it != active_.end();) {
    const auto next = std::next(it);
    const double silent = static_cast<double>(frame.tick - it->second.confirm_tick) * step;
    if (silent > cfg_.expiry + kTimeSlack) {
      events.push_back({AlertEventKind::deactivated, it->first.first, it->first.second, frame.t});
      close(it, frame.t, EndCause::expired);
    }
    it = next;
  }

  for (const DeliveredBeacon & d : delivered) {
    const EntityState * vehicle = frame.find(d.vehicle_id);
    if (vehicle == nullptr || vehicle->kind != EntityKind::vehicle) {
      continue;
    }
    const ConditionResult cond = evaluate_condition(cfg_, *vehicle, d.beacon.pos, *map_);
    if (!cond.met) {
      continue;
    }
    Key key{d.vehicle_id, d.beacon.pedestrian_id};
    auto it = active_.find(key);
    if (it == active_.end()) {
      AlertState st;
      st.vehicle_id = key.first;
      st.pedestrian_id = key.second;
      st.active_since = frame.t;
      st.last_confirm = frame.t;
      st.since_tick = frame.tick;
      st.confirm_tick = frame.tick;
      st.trigger_distance = distance(vehicle->pos, d.beacon.pos);
      st.trigger_vehicle_speed = vehicle->speed;
      st.trigger_ped_crossing_distance = cond.ped_crossing_distance;
      active_.emplace(key, std::move(st));
      events.push_back({AlertEventKind::activated, key.first, key.second, frame.t});
    } else {
      it->second.last_confirm = frame.t;
      it->second.confirm_tick = frame.tick;
      events.push_back({AlertEventKind::confirmed, key.first, key.second, frame.t});
    }
  }

  for (auto it = active_.begin(); it != active_.end();) {
    const auto next = std::next(it);
    if (frame.find(it->first.first) == nullptr) {
      events.push_back({AlertEventKind::deactivated, it->first.first, it->first.second, frame.t});
      close(it, frame.t, EndCause::vehicle_exit);
    } else if (frame.find(it->first.second) == nullptr) {
      events.push_back({AlertEventKind::deactivated, it->first.first, it->first.second, frame.t});
      close(it, frame.t, EndCause::pedestrian_exit);
    }
    it = next;
  }

  std::stable_sort(events.begin(), events.end(), [](const AlertEvent & a, const AlertEvent & b) {
    return std::tie(a.vehicle_id, a.pedestrian_id) < std::tie(b.vehicle_id, b.pedestrian_id);
  });
  return events;
}

void AlertEngine::finish(double t_end)
{
  while (!active_.empty()) {
    close(active_.begin(), t_end, EndCause::simulation_end);
  }
}

std::vector<AlertRecord> AlertEngine::log() const
{
  std::vector<AlertRecord> out = closed_;
  std::sort(out.begin(), out.end(), [](const AlertRecord & a, const AlertRecord & b) {
    return std::tie(a.vehicle_id, a.pedestrian_id, a.since_tick) <
           std::tie(b.vehicle_id, b.pedestrian_id, b.since_tick);
  });
  return out;
}

std::vector<Interval> alert_condition_intervals(
  std::span<const AlertRecord> log, const std::string & vehicle_id)
{
  std::vector<Interval> raw;
  for (const AlertRecord & r : log) {
    if (r.vehicle_id == vehicle_id && r.end > r.active_since) {
      raw.push_back({r.active_since, r.end});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Interval & a, const Interval & b) {
    return a.start < b.start;
  });
  std::vector<Interval> merged;
  for (const Interval & iv : raw) {
    if (!merged.empty() && iv.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

double total_length(std::span<const Interval> intervals)
{
  double sum = 0.0;
  for (const Interval & iv : intervals) {
    sum += iv.length();
  }
  return sum;
}

void write_alert_log(std::span<const AlertRecord> log, std::ostream & out)
{
  out << "vehicle_id,pedestrian_id,algorithm,t_trigger,t_end,end_cause,trigger_distance_m,"
         "trigger_vehicle_speed_mps,trigger_ped_crossing_distance_m,entry_adjacent\n";
  for (const AlertRecord & r : log) {
    out << r.vehicle_id << ',' << r.pedestrian_id << ',' << r.algorithm << ','
        << csv::format_double(r.active_since) << ',' << csv::format_double(r.end) << ','
        << to_string(r.end_cause) << ',' << csv::format_double(r.trigger_distance) << ','
        << csv::format_double(r.trigger_vehicle_speed) << ','
        << csv::format_double(r.trigger_ped_crossing_distance) << ','
        << (r.entry_adjacent ? "true" : "false") << '\n';
  }
}

}  // namespace p2v
