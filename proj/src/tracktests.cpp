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


#include "p2v/tracktests.hpp"

#include "p2v/simrunner.hpp"

namespace p2v
{

namespace
{

constexpr double kLaneY = -1.5;
constexpr double kSidewalkY = 3.0;
constexpr double kCrossingHalfWidth = 4.0;
constexpr double kVehicleSpeed = 5.0;
constexpr double kStartX = -60.0;
constexpr double kEndX = 40.0;

}  // namespace

std::vector<TrackTestCase> track_test_cases()
{
  return {
    {1, 25.0, {0}},
    {2, 15.0, {0, 1, 2}},
    {3, 0.0, {0, 1, 2, 3}},
    {4, 5.0, {0, 1, 2, 3}},
  };
}

TraceSequence build_track_scenario(double ped_to_crossing, ScenarioMap & map_out)
{
  map_out = ScenarioMap(
    Bounds{-100.0, -50.0, 100.0, 50.0},
    {Crossing{"crossing", {{0.0, -kCrossingHalfWidth}, {0.0, kCrossingHalfWidth}}}}, {});

  const double step = TraceSequence::kDefaultStep;
  const Point ped{-ped_to_crossing, kSidewalkY};
  std::vector<Frame> frames;
  for (std::int64_t tick = 0;; ++tick) {
    const double x = kStartX + kVehicleSpeed * static_cast<double>(tick) * step;
    if (x > kEndX) {
      break;
    }
    Frame f;
    f.tick = tick;
    f.t = static_cast<double>(tick) * step;
    f.states.push_back({"ped", EntityKind::pedestrian, ped, Heading(270.0), 0.0});
    f.states.push_back({"veh", EntityKind::vehicle, {x, kLaneY}, Heading(0.0), kVehicleSpeed});
    frames.push_back(std::move(f));
  }
  return TraceSequence::from_frames(step, std::move(frames));
}

TrackTestOutcome run_track_test(const TrackTestCase & test)
{
  ScenarioMap map;
  const TraceSequence trace = build_track_scenario(test.ped_to_crossing, map);
  std::vector<AlgorithmConfig> configs;
  for (int a = 0; a <= 3; ++a) {
    configs.push_back({a, kTrackThAd, kTrackThPs, 1.0});
  }
  const RunResult result = simulate(trace, map, ChannelConfig{}, configs, 1);

  TrackTestOutcome out;
  out.test = test;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    double total = 0.0;
    for (const AlertRecord & r : result.logs[c]) {
      total += r.end - r.active_since;
    }
    out.active_time[configs[c].algorithm] = total;
    if (!result.logs[c].empty()) {
      out.activated.insert(configs[c].algorithm);
    }
  }
  out.pass = out.activated == test.expected;
  return out;
}

std::vector<TrackTestOutcome> replicate_track_tests()
{
  std::vector<TrackTestOutcome> out;
  for (const TrackTestCase & t : track_test_cases()) {
    out.push_back(run_track_test(t));
  }
  return out;
}

}  // namespace p2v
