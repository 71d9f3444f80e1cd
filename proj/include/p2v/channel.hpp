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

#include "p2v/rng.hpp"
#include "p2v/scenario.hpp"
#include "p2v/trace.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2v
{

struct Beacon
{
  std::string pedestrian_id;
  Point pos;  // reported position; equals the true position (no positioning error)
  double t_sent{0.0};
  std::int64_t tick{0};
};

struct ChannelConfig
{
  double period{0.3};
  double range{100.0};
  double loss_prob{0.0};

  /// Throws ConfigError unless period is a positive multiple of step, range > 0 and
  /// loss_prob in [0, 1].
  void validate(double step) const;
  std::int64_t period_ticks(double step) const;
};

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Beacon phase per pedestrian id, in seconds, each in [0, period) and on the step grid.
using PhaseMap = std::map<std::string, double>;

/// Phase drawn from the pedestrian's own substream.
double assign_phase(
  const std::string & pedestrian_id, std::uint64_t seed, const ChannelConfig & cfg, double step);

/// One beacon for every pedestrian whose (t - phase) is a non-negative multiple of period.
std::vector<Beacon> beacons_due(
  const Frame & frame, const ChannelConfig & cfg, const PhaseMap & phases,
  double step = TraceSequence::kDefaultStep);

/// Range (inclusive) and line-of-sight test only; no randomness.
bool reachable(const Beacon & b, const EntityState & vehicle, const ScenarioMap & map,
  const ChannelConfig & cfg);

/// reachable() followed by a Bernoulli(1 - loss_prob) draw. The draw happens only when the
/// geometric test passes and loss_prob > 0.
bool deliver(const Beacon & b, const EntityState & vehicle, const ScenarioMap & map,
  const ChannelConfig & cfg, rng::Engine & rng);

struct Delivery
{
  std::size_t beacon;   // index into the beacon list
  std::size_t vehicle;  // index into the vehicle list
};

/// Geometric screening of every (beacon, vehicle) pair, row-major mask of size B x V.
/// OpenMP-parallel over beacons.
std::vector<std::uint8_t> reachability_mask(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg);

/// Delivered pairs in (beacon, vehicle) order. Loss draws are taken sequentially in that
/// order after the parallel screening, so results do not depend on the thread count.
std::vector<Delivery> deliver_all(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg, rng::Engine & rng, bool parallel = true);

namespace serial
{

std::vector<std::uint8_t> reachability_mask(
  std::span<const Beacon> beacons, std::span<const EntityState * const> vehicles,
  const ScenarioMap & map, const ChannelConfig & cfg);

}  // namespace serial

}  // namespace p2v
