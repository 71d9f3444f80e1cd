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


// Serial reference vs OpenMP kernels on one busy step of a generated city.

#include "p2v/channel.hpp"
#include "p2v/oracle.hpp"
#include "p2v/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

#include <algorithm>
#include <vector>

namespace
{

using namespace p2v;

struct Snapshot
{
  ScenarioMap map;
  TraceSequence trace;
  const Frame * prev{nullptr};
  const Frame * cur{nullptr};
  std::vector<Beacon> beacons;
  std::vector<const EntityState *> vehicles;
};

// The most populated step of a 6x6 city with dense traffic, every pedestrian beaconing.
const Snapshot & snapshot()
{
  static const Snapshot s = [] {
    SyntheticParams p;
    p.blocks_x = 6;
    p.blocks_y = 6;
    p.duration = 120.0;
    p.warmup = 600.0;
    p.vehicle_interarrival = 2.0;
    p.pedestrian_interarrival = 1.5;
    Snapshot out;
    out.trace = generate_synthetic(p, out.map);
    const auto & frames = out.trace.frames();
    const auto busiest = std::max_element(frames.begin() + 1, frames.end(), [](const Frame & a, const Frame & b) {
      return a.states.size() < b.states.size();
    });
    out.cur = &*busiest;
    out.prev = &*(busiest - 1);
    for (const EntityState & e : out.cur->states) {
      if (e.kind == EntityKind::pedestrian) {
        out.beacons.push_back({e.id, e.pos, out.cur->t, out.cur->tick});
      } else {
        out.vehicles.push_back(&e);
      }
    }
    return out;
  }();
  return s;
}

void set_counters(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  state.counters["beacons"] = static_cast<double>(s.beacons.size());
  state.counters["vehicles"] = static_cast<double>(s.vehicles.size());
}

void BM_ReachabilitySerial(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  const ChannelConfig cfg{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::reachability_mask(s.beacons, s.vehicles, s.map, cfg));
  }
  set_counters(state);
}

void BM_ReachabilityParallel(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  const ChannelConfig cfg{};
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reachability_mask(s.beacons, s.vehicles, s.map, cfg));
  }
  set_counters(state);
}

void BM_DangerSerial(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::detect_danger(*s.prev, *s.cur, s.map));
  }
  set_counters(state);
}

void BM_DangerParallel(benchmark::State & state)
{
  const Snapshot & s = snapshot();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_danger(*s.prev, *s.cur, s.map));
  }
  set_counters(state);
}

}  // namespace

BENCHMARK(BM_ReachabilitySerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ReachabilityParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_DangerSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DangerParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
