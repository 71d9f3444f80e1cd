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
#include "p2v/channel.hpp"
#include "p2v/oracle.hpp"
#include "p2v/scenario.hpp"
#include "p2v/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace p2v
{

struct SimOptions
{
  bool parallel_kernels{true};
  bool run_oracle{true};
};

struct ChannelStats
{
  std::size_t beacons_sent{0};
  std::size_t deliveries{0};
};

struct RunResult
{
  std::vector<AlgorithmConfig> configs;
  std::vector<std::vector<AlertRecord>> logs;  // parallel to configs
  std::vector<DangerEvent> danger_events;
  ChannelStats channel;
  std::uint64_t seed{0};
  std::uint64_t config_hash{0};
  double t_begin{0.0};
  double t_end{0.0};
};

std::uint64_t config_hash(
  const ChannelConfig & channel, std::span<const AlgorithmConfig> configs, std::uint64_t seed);

/// One deterministic pass over the trace. Per step: beacons due, delivery to every present
/// vehicle (channel randomness drawn once per pair and shared by every algorithm config),
/// alert processing per config, then danger detection against the previous frame.
/// Beacons go in pedestrian-id order and vehicles in vehicle-id order.
RunResult simulate(
  const TraceSequence & trace, const ScenarioMap & map, const ChannelConfig & channel,
  std::span<const AlgorithmConfig> configs, std::uint64_t seed, const SimOptions & opts = {});

}  // namespace p2v
