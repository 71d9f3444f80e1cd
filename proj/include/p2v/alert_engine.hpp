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

#include "p2v/channel.hpp"
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

/// Which alert rule a vehicle applies to each received beacon.
///
/// - 0: pedestrian closer than th_ad.
/// - 1: rule 0 and some crossing closer than th_ad.
/// - 2: rule 0 and some crossing closer than th_ad lying in front of the vehicle.
/// - 3: rule 0, pedestrian in front, and one single crossing that is closer than th_ad,
///      in front of the vehicle, and closer than th_ps to the pedestrian.
struct AlgorithmConfig
{
  int algorithm{3};
  double th_ad{40.0};
  double th_ps{10.0};
  double expiry{1.0};

  /// Throws ConfigError on an unknown algorithm, non-positive thresholds, or an expiry
  /// shorter than the beacon period.
  void validate(double beacon_period) const;
};

struct ConditionResult
{
  bool met{false};
  /// Pedestrian distance to the qualifying crossing (algorithm 3) or to the nearest crossing
  /// (algorithms 0-2); +inf without crossings.
  double ped_crossing_distance{0.0};
};

ConditionResult evaluate_condition(
  const AlgorithmConfig & cfg, const EntityState & vehicle, Point ped_pos, const ScenarioMap & map);

inline bool condition(
  const AlgorithmConfig & cfg, const EntityState & vehicle, Point ped_pos, const ScenarioMap & map)
{
  return evaluate_condition(cfg, vehicle, ped_pos, map).met;
}

struct AlertState
{
  std::string vehicle_id;
  std::string pedestrian_id;
  double active_since{0.0};
  double last_confirm{0.0};
  double trigger_distance{0.0};
  double trigger_vehicle_speed{0.0};
  double trigger_ped_crossing_distance{0.0};
  std::int64_t since_tick{0};
  std::int64_t confirm_tick{0};
};

enum class EndCause { expired, vehicle_exit, pedestrian_exit, simulation_end };

const char * to_string(EndCause c);

struct AlertRecord : AlertState
{
  int algorithm{0};
  double end{0.0};
  EndCause end_cause{EndCause::expired};
  bool entry_adjacent{false};
};

enum class AlertEventKind { activated, confirmed, deactivated };

struct AlertEvent
{
  AlertEventKind kind{AlertEventKind::activated};
  std::string vehicle_id;
  std::string pedestrian_id;
  double t{0.0};
};

struct DeliveredBeacon
{
  Beacon beacon;
  std::string vehicle_id;
};

/// Per-run alert store for one algorithm configuration. One alert per (vehicle, pedestrian)
/// pair at a time; a failing beacon never ends an alert, only the expiry timer or an exit does.
class AlertEngine
{
public:
  static constexpr double kEntryWindow = 1.0;

  AlertEngine(AlgorithmConfig cfg, const ScenarioMap & map, const TraceSequence & trace);

  /// Expire alerts silent for longer than the expiry, then confirm/activate from this frame's
  /// deliveries, then close alerts whose vehicle or pedestrian is gone. Events come back in
  /// (vehicle, pedestrian) order.
  std::vector<AlertEvent> process_frame(
    const Frame & frame, std::span<const DeliveredBeacon> delivered);

  /// Closes everything still active at time `t_end` with cause simulation_end.
  void finish(double t_end);

  const AlgorithmConfig & config() const { return cfg_; }
  std::size_t active_count() const { return active_.size(); }
  bool is_active(const std::string & vehicle_id, const std::string & pedestrian_id) const;

  /// Closed alerts sorted by (vehicle, pedestrian, trigger time).
  std::vector<AlertRecord> log() const;

private:
  using Key = std::pair<std::string, std::string>;

  void close(std::map<Key, AlertState>::iterator it, double end, EndCause cause);

  AlgorithmConfig cfg_;
  const ScenarioMap * map_;
  const TraceSequence * trace_;
  std::map<Key, AlertState> active_;
  std::vector<AlertRecord> closed_;
};

struct Interval
{
  double start{0.0};
  double end{0.0};

  double length() const { return end - start; }
  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Union of the vehicle's [active_since, end) alert intervals, merged and sorted.
std::vector<Interval> alert_condition_intervals(
  std::span<const AlertRecord> log, const std::string & vehicle_id);

double total_length(std::span<const Interval> intervals);

void write_alert_log(std::span<const AlertRecord> log, std::ostream & out);

}  // namespace p2v
