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

#include "p2v/oracle.hpp"

#include "p2v/csv.hpp"

#include <algorithm>
#include <ostream>

namespace p2v
{

namespace
{

// Danger pairs of one pedestrian, in vehicle-id order (frames are id-sorted).
void pairs_for_pedestrian(
  const EntityState & ped, const Frame & prev, const Frame & cur, const ScenarioMap & map,
  const DangerThresholds & th, std::vector<DangerPair> & out)
{
  const EntityState * ped_before = prev.find(ped.id);
  if (ped_before == nullptr) {
    return;
  }
  if (map.crossings_within(ped.pos, th.crossing_margin).empty()) {
    return;
  }
  for (const EntityState & veh : cur.states) {
    if (veh.kind != EntityKind::vehicle) {
      continue;
    }
    const double now = distance(veh.pos, ped.pos);
    if (!(now < th.close_distance)) {
      continue;
    }
    const EntityState * veh_before = prev.find(veh.id);
    if (veh_before == nullptr) {
      continue;
    }
    if (now < distance(veh_before->pos, ped_before->pos)) {
      out.push_back({veh.id, ped.id, now});
    }
  }
}

void sort_pairs(std::vector<DangerPair> & pairs)
{
  std::sort(pairs.begin(), pairs.end(), [](const DangerPair & a, const DangerPair & b) {
    return std::tie(a.vehicle_id, a.pedestrian_id) < std::tie(b.vehicle_id, b.pedestrian_id);
  });
}

}  // namespace

namespace serial
{

std::vector<DangerPair> detect_danger(
  const Frame & prev, const Frame & cur, const ScenarioMap & map, const DangerThresholds & th)
{
  std::vector<DangerPair> out;
  for (const EntityState & ped : cur.states) {
    if (ped.kind == EntityKind::pedestrian) {
      pairs_for_pedestrian(ped, prev, cur, map, th, out);
    }
  }
  sort_pairs(out);
  return out;
}

}  // namespace serial

std::vector<DangerPair> detect_danger(
  const Frame & prev, const Frame & cur, const ScenarioMap & map, const DangerThresholds & th)
{
  const auto n = static_cast<std::int64_t>(cur.states.size());
  std::vector<std::vector<DangerPair>> per_entity(cur.states.size());
#pragma omp parallel for schedule(dynamic, 8) if (n > 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const EntityState & ped = cur.states[static_cast<std::size_t>(i)];
    if (ped.kind == EntityKind::pedestrian) {
      pairs_for_pedestrian(ped, prev, cur, map, th, per_entity[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<DangerPair> out;
  for (auto & v : per_entity) {
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  sort_pairs(out);
  return out;
}

void DangerTracker::add(std::int64_t tick, double t, std::span<const DangerPair> flagged)
{
  for (const DangerPair & p : flagged) {
    Key key{p.vehicle_id, p.pedestrian_id};
    auto it = open_.find(key);
    if (it != open_.end() && it->second.end_tick == tick - 1) {
      it->second.end_tick = tick;
      it->second.t_end = t;
      it->second.min_distance = std::min(it->second.min_distance, p.distance);
      continue;
    }
    if (it != open_.end()) {
      done_.push_back(std::move(it->second));
      open_.erase(it);
    }
    open_.emplace(key, DangerEvent{p.vehicle_id, p.pedestrian_id, t, t, p.distance, tick, tick});
  }
  // Episodes not extended at this tick are over.
  for (auto it = open_.begin(); it != open_.end();) {
    if (it->second.end_tick < tick) {
      done_.push_back(std::move(it->second));
      it = open_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<DangerEvent> DangerTracker::finish()
{
  for (auto & [key, ev] : open_) {
    done_.push_back(std::move(ev));
  }
  open_.clear();
  std::vector<DangerEvent> out = std::move(done_);
  done_.clear();
  std::sort(out.begin(), out.end(), [](const DangerEvent & a, const DangerEvent & b) {
    return std::tie(a.start_tick, a.vehicle_id, a.pedestrian_id) <
           std::tie(b.start_tick, b.vehicle_id, b.pedestrian_id);
  });
  return out;
}

std::vector<DangerEvent> coalesce(std::span<const FlaggedStep> steps)
{
  DangerTracker tracker;
  for (const FlaggedStep & s : steps) {
    tracker.add(s.tick, s.t, s.pairs);
  }
  return tracker.finish();
}

std::vector<DangerEvent> coverage_check(
  std::span<const DangerEvent> events, std::span<const AlertRecord> log)
{
  std::map<std::pair<std::string, std::string>, std::vector<const AlertRecord *>> by_pair;
  for (const AlertRecord & r : log) {
    by_pair[{r.vehicle_id, r.pedestrian_id}].push_back(&r);
  }
  std::vector<DangerEvent> uncovered;
  for (const DangerEvent & ev : events) {
    const auto it = by_pair.find({ev.vehicle_id, ev.pedestrian_id});
    const bool covered = it != by_pair.end() &&
                         std::any_of(it->second.begin(), it->second.end(), [&](const AlertRecord * r) {
                           return r->active_since <= ev.t_end && r->end > ev.t_start;
                         });
    if (!covered) {
      uncovered.push_back(ev);
    }
  }
  return uncovered;
}

void write_danger_events(std::span<const DangerEvent> events, std::ostream & out)
{
  out << "vehicle_id,pedestrian_id,t_start,t_end,min_distance_m\n";
  for (const DangerEvent & e : events) {
    out << e.vehicle_id << ',' << e.pedestrian_id << ',' << csv::format_double(e.t_start) << ','
        << csv::format_double(e.t_end) << ',' << csv::format_double(e.min_distance) << '\n';
  }
}

}  // namespace p2v
