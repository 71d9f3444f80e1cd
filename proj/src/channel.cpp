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

#include "p2v/channel.hpp"

#include <cmath>

namespace p2v
{

void ChannelConfig::validate(double step) const
{
  if (!(period > 0.0)) {
    throw ConfigError("channel: period must be positive");
  }
  const double ratio = period / step;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0) {
    throw ConfigError("channel: period must be a multiple of the simulation step");
  }
  if (!(range > 0.0)) {
    throw ConfigError("channel: range must be positive");
  }
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
    throw ConfigError("channel: loss_prob must lie in [0, 1]");
  }
}

std::int64_t ChannelConfig::period_ticks(double step) const
{
  return static_cast<std::int64_t>(std::llround(period / step));
}

double assign_phase(
  const std::string & pedestrian_id, std::uint64_t seed, const ChannelConfig & cfg, double step)
{
  auto eng = rng::stream(seed, "beacon-phase", pedestrian_id);
  const auto slots = static_cast<std::size_t>(cfg.period_ticks(step));
  return static_cast<double>(rng::index(eng, slots)) * step;
}

std::vector<Beacon> beacons_due(
  const Frame & frame, const ChannelConfig & cfg, const PhaseMap & phases, double step)
{
  std::vector<Beacon> out;
  const std::int64_t period = cfg.period_ticks(step);
  for (const EntityState & s : frame.states) {
    if (s.kind != EntityKind::pedestrian) {
      continue;
    }
    const auto it = phases.find(s.id);
    if (it == phases.end()) {
      throw ConfigError("channel: no beacon phase for pedestrian '" + s.id + "'");
    }
    const auto phase = static_cast<std::int64_t>(std::llround(it->second / step));
    const std::int64_t since = frame.tick - phase;
    if (since >= 0 && since % period == 0) {
      out.push_back({s.id, s.pos, frame.t, frame.tick});
    }
  }
  return out;
}

bool reachable(
  const Beacon & b, const EntityState & vehicle, const ScenarioMap & map, const ChannelConfig & cfg)
{
  return distance(b.pos, vehicle.pos) <= cfg.range && map.line_of_sight(b.pos, vehicle.pos);
}

bool deliver(
  const Beacon & b, const EntityState & vehicle, const ScenarioMap & map, const ChannelConfig & cfg,
  rng::Engine & rng)
{
  if (!reachable(b, vehicle, map, cfg)) {
    return false;
  }
  if (cfg.loss_prob > 0.0) {
    return rng::bernoulli(rng, 1.0 - cfg.loss_prob);
  }
  return true;
}

namespace serial
{

std::vector<std::uint8_t> reachability_mask(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg)
{
  std::vector<std::uint8_t> mask(beacons.size() * vehicles.size(), 0);
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    for (std::size_t j = 0; j < vehicles.size(); ++j) {
      mask[i * vehicles.size() + j] = reachable(beacons[i], *vehicles[j], map, cfg) ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace serial

std::vector<std::uint8_t> reachability_mask(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg)
{
  const auto nb = static_cast<std::int64_t>(beacons.size());
  const std::size_t nv = vehicles.size();
  std::vector<std::uint8_t> mask(beacons.size() * nv, 0);
#pragma omp parallel for schedule(dynamic, 4) if (nb * static_cast<std::int64_t>(nv) > 256)
  for (std::int64_t i = 0; i < nb; ++i) {
    const auto row = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nv; ++j) {
      mask[row * nv + j] = reachable(beacons[row], *vehicles[j], map, cfg) ? 1 : 0;
    }
  }
  return mask;
}

std::vector<Delivery> deliver_all(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg, rng::Engine & rng, bool parallel)
{
  const auto mask = parallel ? reachability_mask(beacons, vehicles, map, cfg)
                             : serial::reachability_mask(beacons, vehicles, map, cfg);
  std::vector<Delivery> out;
  const std::size_t nv = vehicles.size();
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      if (!mask[i * nv + j]) {
        continue;
      }
      if (cfg.loss_prob > 0.0 && !rng::bernoulli(rng, 1.0 - cfg.loss_prob)) {
        continue;
      }
      out.push_back({i, j});
    }
  }
  return out;
}

}  // namespace p2v
