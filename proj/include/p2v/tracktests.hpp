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


/**
 * @file tracktests.hpp
 * @brief Built-in test-track scenarios: a vehicle on a straight road passes a static
 *        pedestrian standing on the sidewalk some distance before a crossing.
 */

#pragma once

#include "p2v/scenario.hpp"
#include "p2v/trace.hpp"

#include <map>
#include <set>
#include <vector>

namespace p2v
{

struct TrackTestCase
{
  int configuration{1};
  double ped_to_crossing{25.0};  // meters, measured along the road
  std::set<int> expected;        // algorithms that must activate, all others must not
};

struct TrackTestOutcome
{
  TrackTestCase test;
  std::set<int> activated;
  std::map<int, double> active_time;  // algorithm -> total alert seconds
  bool pass{false};
};

/// th_ad = 10 m and th_ps = 10 m, accurate positions, no loss, no buildings.
inline constexpr double kTrackThAd = 10.0;
inline constexpr double kTrackThPs = 10.0;

std::vector<TrackTestCase> track_test_cases();

/// Straight road along +x with the crossing at x = 0; returns the trace, fills the map.
TraceSequence build_track_scenario(double ped_to_crossing, ScenarioMap & map_out);

TrackTestOutcome run_track_test(const TrackTestCase & test);

std::vector<TrackTestOutcome> replicate_track_tests();

}  // namespace p2v
