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

#include "p2v/simrunner.hpp"

#include <nlohmann/json.hpp>

namespace p2v
{

std::uint64_t config_hash(
  const ChannelConfig & channel, std::span<const AlgorithmConfig> configs, std::uint64_t seed)
{
  nlohmann::json j;
  j["channel"] = {
    {"period", channel.period}, {"range", channel.range}, {"loss_prob", channel.loss_prob}};
  j["algorithms"] = nlohmann::json::array();
  for (const AlgorithmConfig & c : configs) {
    j["algorithms"].push_back(
      {{"algorithm", c.algorithm}, {"th_ad", c.th_ad}, {"th_ps", c.th_ps}, {"expiry", c.expiry}});
  }
  j["seed"] = seed;
  return rng::fnv1a(j.dump());
}

RunResult simulate(
  const TraceSequence & trace, const ScenarioMap & map, const ChannelConfig & channel,
  std::span<const AlgorithmConfig> configs, std::uint64_t seed, const SimOptions & opts)
{
  const double step = trace.step();
  channel.validate(step);
  for (const AlgorithmConfig & c : configs) {
    c.validate(channel.period);
  }

  RunResult result;
  result.configs.assign(configs.begin(), configs.end());
  result.seed = seed;
  result.config_hash = config_hash(channel, configs, seed);

  std::vector<AlertEngine> engines;
  engines.reserve(configs.size());
  for (const AlgorithmConfig & c : configs) {
    engines.emplace_back(c, map, trace);
  }

  PhaseMap phases;
  for (const auto & [id, life] : trace.lifetimes()) {
    if (life.kind == EntityKind::pedestrian) {
      phases.emplace(id, assign_phase(id, seed, channel, step));
    }
  }

  auto channel_rng = rng::stream(seed, "channel-loss");
  DangerTracker danger;
  const Frame * prev = nullptr;
  std::vector<DeliveredBeacon> delivered;
  for (const Frame & frame : trace.frames()) {
    const auto beacons = beacons_due(frame, channel, phases, step);
    std::vector<const EntityState *> vehicles;
    for (const EntityState & s : frame.states) {
      if (s.kind == EntityKind::vehicle) {
        vehicles.push_back(&s);
      }
    }
    const auto pairs =
      deliver_all(beacons, vehicles, map, channel, channel_rng, opts.parallel_kernels);
    result.channel.beacons_sent += beacons.size();
    result.channel.deliveries += pairs.size();

    delivered.clear();
    delivered.reserve(pairs.size());
    for (const Delivery & d : pairs) {
      delivered.push_back({beacons[d.beacon], vehicles[d.vehicle]->id});
    }
    for (AlertEngine & engine : engines) {
      engine.process_frame(frame, delivered);
    }

    if (opts.run_oracle && prev != nullptr) {
      const auto flagged = opts.parallel_kernels ? detect_danger(*prev, frame, map)
                                                 : serial::detect_danger(*prev, frame, map);
      danger.add(frame.tick, frame.t, flagged);
    }
    prev = &frame;
  }

  result.t_begin = trace.time_of(trace.first_tick());
  result.t_end = trace.time_of(trace.last_tick() + 1);
  for (AlertEngine & engine : engines) {
    engine.finish(result.t_end);
    result.logs.push_back(engine.log());
  }
  result.danger_events = danger.finish();
  return result;
}

}  // namespace p2v
