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

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace p2v
{
namespace
{

using test::frame;
using test::open_map;
using test::pedestrian;
using test::vehicle;

AlgorithmConfig alg(int a, double th_ad = 10.0, double th_ps = 10.0)
{
  return AlgorithmConfig{a, th_ad, th_ps, 1.0};
}

// Vehicle at the origin heading +x; a crossing across the road at x = 9.
const ScenarioMap & track_map()
{
  static const ScenarioMap map = open_map({{"c", {{9, -4}, {9, 4}}}});
  return map;
}

TEST(Condition, PedestrianFarFromCrossingOnlyAlg0)
{
  // Pedestrian 9 m ahead, crossing 25 m beyond, so none within th_ad of the vehicle.
  const ScenarioMap map = open_map({{"c", {{34, -4}, {34, 4}}}});
  const EntityState v = vehicle("v", {0, 0});
  const Point ped{9, 0};
  EXPECT_TRUE(condition(alg(0), v, ped, map));
  EXPECT_FALSE(condition(alg(1), v, ped, map));
  EXPECT_FALSE(condition(alg(2), v, ped, map));
  EXPECT_FALSE(condition(alg(3), v, ped, map));
}

TEST(Condition, PedestrianFarFromQualifyingCrossingNotAlg3)
{
  // Crossing ahead within reach; pedestrian ahead within reach but about 15 m from it.
  const ScenarioMap map = open_map({{"c", {{9, 4}, {9, 8}}}});
  const EntityState v = vehicle("v", {0, 0});
  const Point ped{1, -9};
  ASSERT_LT(distance(v.pos, ped), 10.0);
  ASSERT_GT(distance_to_segment(ped, map.crossings()[0].span), 15.0);
  EXPECT_TRUE(condition(alg(0), v, ped, map));
  EXPECT_TRUE(condition(alg(1), v, ped, map));
  EXPECT_TRUE(condition(alg(2), v, ped, map));
  EXPECT_FALSE(condition(alg(3), v, ped, map));
}

TEST(Condition, PedestrianOnCrossingAllFour)
{
  const EntityState v = vehicle("v", {0, 0});
  const Point ped{9, 1};
  for (int a = 0; a <= 3; ++a) {
    EXPECT_TRUE(condition(alg(a), v, ped, track_map())) << a;
  }
}

TEST(Condition, ThresholdsAreStrict)
{
  const EntityState v = vehicle("v", {0, 0});
  EXPECT_FALSE(condition(alg(0), v, {10, 0}, open_map()));
  EXPECT_TRUE(condition(alg(0), v, {9.999, 0}, open_map()));
  // Crossing exactly th_ad away does not count.
  const ScenarioMap map = open_map({{"c", {{10, -4}, {10, 4}}}});
  EXPECT_FALSE(condition(alg(1), v, {5, 0}, map));
}

TEST(Condition, CrossingBehindFailsAlg2)
{
  const ScenarioMap map = open_map({{"c", {{-5, -4}, {-5, 4}}}});
  const EntityState v = vehicle("v", {0, 0});
  EXPECT_TRUE(condition(alg(1), v, {3, 0}, map));
  EXPECT_FALSE(condition(alg(2), v, {3, 0}, map));
}

TEST(Condition, Alg3NeedsOneCrossingSatisfyingEverything)
{
  // Crossing A is ahead but far from the pedestrian; crossing B is near the pedestrian but
  // behind the vehicle. No single crossing qualifies.
  const ScenarioMap map = open_map({{"A", {{8, -4}, {8, 4}}}, {"B", {{-8, -4}, {-8, 4}}}});
  const EntityState v = vehicle("v", {0, 0});
  const Point ped{2, -9.5};
  ASSERT_TRUE(is_in_front(v.pos, v.heading, ped));
  EXPECT_FALSE(condition(alg(3, 10.0, 8.0), v, ped, map));
  EXPECT_TRUE(condition(alg(3, 10.0, 8.5), v, ped, map));
}

TEST(Condition, PedCrossingDistanceReported)
{
  const EntityState v = vehicle("v", {0, 0});
  const auto r3 = evaluate_condition(alg(3), v, {7, 0}, track_map());
  EXPECT_DOUBLE_EQ(r3.ped_crossing_distance, 2.0);
  const auto r0 = evaluate_condition(alg(0), v, {3, 0}, open_map());
  EXPECT_TRUE(std::isinf(r0.ped_crossing_distance));
}

// Static pedestrian ahead of a static vehicle; beacons delivered on selected ticks.
struct Timeline
{
  TraceSequence trace;
  std::vector<AlertRecord> log;
  std::vector<std::vector<AlertEvent>> events;
};

Timeline run_static(const std::set<std::int64_t> & beacon_ticks, std::int64_t ticks, int a = 0)
{
  std::vector<Frame> frames;
  for (std::int64_t k = 0; k < ticks; ++k) {
    frames.push_back(frame(k, {vehicle("v", {0, 0}), pedestrian("p", {5, 0})}));
  }
  Timeline tl{TraceSequence::from_frames(0.1, frames), {}, {}};
  AlertEngine engine(alg(a), track_map(), tl.trace);
  for (const Frame & f : tl.trace.frames()) {
    std::vector<DeliveredBeacon> delivered;
    if (beacon_ticks.count(f.tick)) {
      delivered.push_back({Beacon{"p", {5, 0}, f.t, f.tick}, "v"});
    }
    tl.events.push_back(engine.process_frame(f, delivered));
  }
  engine.finish(tl.trace.time_of(tl.trace.last_tick() + 1));
  tl.log = engine.log();
  return tl;
}

TEST(Expiry, DeactivatesAtFirstStepPastOneSecond)
{
  const Timeline tl = run_static({0, 3, 6}, 30);
  ASSERT_EQ(tl.log.size(), 1u);
  EXPECT_NEAR(tl.log[0].end, 1.7, 1e-9);
  EXPECT_EQ(tl.log[0].end_cause, EndCause::expired);
  EXPECT_NEAR(tl.log[0].last_confirm, 0.6, 1e-9);
  EXPECT_EQ(tl.events[17].size(), 1u);
  EXPECT_EQ(tl.events[17][0].kind, AlertEventKind::deactivated);
  EXPECT_TRUE(tl.events[16].empty());
}

TEST(Expiry, TwoLostBeaconsKeepAlertAlive)
{
  // Confirmations at 0.0 and 0.9: the beacons at 0.3 and 0.6 were lost.
  const Timeline tl = run_static({0, 9, 18}, 25);
  ASSERT_EQ(tl.log.size(), 1u);
  EXPECT_NEAR(tl.log[0].active_since, 0.0, 1e-12);
}

TEST(Expiry, GapJustOverOneSecondSplitsAlert)
{
  const Timeline tl = run_static({0, 11}, 25);
  ASSERT_EQ(tl.log.size(), 2u);
  EXPECT_NEAR(tl.log[0].end, 1.1, 1e-9);
  EXPECT_NEAR(tl.log[1].active_since, 1.1, 1e-9);
}

TEST(Expiry, ExactlyOneSecondSurvives)
{
  const Timeline tl = run_static({0, 10}, 15);
  ASSERT_EQ(tl.log.size(), 1u);
  EXPECT_EQ(tl.log[0].end_cause, EndCause::simulation_end);
  EXPECT_NEAR(tl.log[0].end, 1.5, 1e-9);
}

TEST(Expiry, FailingBeaconDoesNotDeactivate)
{
  // The vehicle turns away after the trigger; alg 3 stops confirming but only expiry ends it.
  std::vector<Frame> frames;
  for (std::int64_t k = 0; k < 20; ++k) {
    frames.push_back(frame(k, {vehicle("v", {0, 0}, k < 3 ? 0.0 : 180.0), pedestrian("p", {5, 0})}));
  }
  const TraceSequence trace = TraceSequence::from_frames(0.1, frames);
  AlertEngine engine(alg(3), track_map(), trace);
  for (const Frame & f : trace.frames()) {
    const std::vector<DeliveredBeacon> d{{Beacon{"p", {5, 0}, f.t, f.tick}, "v"}};
    engine.process_frame(f, d);
  }
  const auto log = engine.log();
  ASSERT_EQ(log.size(), 1u);
  EXPECT_NEAR(log[0].last_confirm, 0.2, 1e-9);
  EXPECT_NEAR(log[0].end, 1.3, 1e-9);
}

TEST(Engine, TwoVehiclesTwoIndependentAlerts)
{
  std::vector<Frame> frames{frame(0, {vehicle("v1", {0, 0}), vehicle("v2", {0, 2}), pedestrian("p", {5, 1})})};
  const TraceSequence trace = TraceSequence::from_frames(0.1, frames);
  AlertEngine engine(alg(0), open_map(), trace);
  const Beacon b{"p", {5, 1}, 0.0, 0};
  const std::vector<DeliveredBeacon> d{{b, "v1"}, {b, "v2"}};
  const auto events = engine.process_frame(trace.frames()[0], d);
  EXPECT_EQ(events.size(), 2u);
  EXPECT_TRUE(engine.is_active("v1", "p"));
  EXPECT_TRUE(engine.is_active("v2", "p"));
  EXPECT_EQ(engine.active_count(), 2u);
}

TEST(Engine, TriggerFieldsAndEntryAdjacency)
{
  std::vector<Frame> frames;
  for (std::int64_t k = 0; k < 40; ++k) {
    std::vector<EntityState> s{vehicle("v", {static_cast<double>(k) * 0.1, 0}, 0.0, 1.0)};
    if (k >= 5) {
      s.push_back(pedestrian("p", {8, 0}));
    }
    frames.push_back(frame(k, s));
  }
  const TraceSequence trace = TraceSequence::from_frames(0.1, frames);
  AlertEngine engine(alg(0), open_map(), trace);
  for (const Frame & f : trace.frames()) {
    std::vector<DeliveredBeacon> d;
    if (f.tick == 15 || f.tick == 30) {
      d.push_back({Beacon{"p", {8, 0}, f.t, f.tick}, "v"});
    }
    engine.process_frame(f, d);
  }
  engine.finish(4.0);
  const auto log = engine.log();
  ASSERT_EQ(log.size(), 2u);
  // Trigger 1.0 s after the pedestrian appeared is still entry-adjacent; 2.5 s is not.
  EXPECT_TRUE(log[0].entry_adjacent);
  EXPECT_FALSE(log[1].entry_adjacent);
  EXPECT_NEAR(log[0].trigger_distance, 6.5, 1e-9);
  EXPECT_DOUBLE_EQ(log[0].trigger_vehicle_speed, 1.0);
}

TEST(Engine, ExitsCloseAlerts)
{
  std::vector<Frame> frames{
    frame(0, {vehicle("v", {0, 0}), pedestrian("p", {5, 0}), pedestrian("q", {4, 0})}),
    frame(1, {vehicle("v", {0, 0}), pedestrian("q", {4, 0})}),
    frame(2, {pedestrian("q", {4, 0})}),
  };
  const TraceSequence trace = TraceSequence::from_frames(0.1, frames);
  AlertEngine engine(alg(0), open_map(), trace);
  const std::vector<DeliveredBeacon> d{
    {Beacon{"p", {5, 0}, 0.0, 0}, "v"}, {Beacon{"q", {4, 0}, 0.0, 0}, "v"}};
  engine.process_frame(trace.frames()[0], d);
  engine.process_frame(trace.frames()[1], {});
  engine.process_frame(trace.frames()[2], {});
  const auto log = engine.log();
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].end_cause, EndCause::pedestrian_exit);
  EXPECT_NEAR(log[0].end, 0.1, 1e-12);
  EXPECT_EQ(log[1].end_cause, EndCause::vehicle_exit);
  EXPECT_NEAR(log[1].end, 0.2, 1e-12);
}

TEST(Intervals, Examples)
{
  auto rec = [](double a, double b) {
    AlertRecord r;
    r.vehicle_id = "v";
    r.active_since = a;
    r.end = b;
    return r;
  };
  const std::vector<AlertRecord> overlap{rec(0, 5), rec(3, 8)};
  const auto iv = alert_condition_intervals(overlap, "v");
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_EQ(iv[0], (Interval{0, 8}));
  EXPECT_DOUBLE_EQ(total_length(iv), 8.0);
  EXPECT_TRUE(alert_condition_intervals({}, "v").empty());
  const std::vector<AlertRecord> apart{rec(0, 1), rec(2, 3)};
  EXPECT_DOUBLE_EQ(total_length(alert_condition_intervals(apart, "v")), 2.0);
  EXPECT_TRUE(alert_condition_intervals(apart, "other").empty());
}

TEST(AlertLog, CsvHeader)
{
  std::ostringstream out;
  write_alert_log({}, out);
  EXPECT_EQ(out.str(),
    "vehicle_id,pedestrian_id,algorithm,t_trigger,t_end,end_cause,trigger_distance_m,"
    "trigger_vehicle_speed_mps,trigger_ped_crossing_distance_m,entry_adjacent\n");
}

TEST(AlgorithmConfig, Validation)
{
  EXPECT_NO_THROW(alg(3).validate(0.3));
  EXPECT_THROW(alg(4).validate(0.3), ConfigError);
  EXPECT_THROW((AlgorithmConfig{0, 0.0, 10, 1}.validate(0.3)), ConfigError);
  EXPECT_THROW((AlgorithmConfig{0, 40, 10, 0.2}.validate(0.3)), ConfigError);
}

// Nesting: at any vehicle state and pedestrian position, a higher algorithm's condition
// implies every lower one.
TEST(Condition, NestingOnRandomConfigurations)
{
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  std::uniform_real_distribution<double> h(0.0, 360.0);
  std::vector<Crossing> crossings;
  for (int i = 0; i < 12; ++i) {
    const Point a{u(eng), u(eng)};
    crossings.push_back({"c" + std::to_string(i), {a, a + Point{u(eng) / 10.0, 8.0}}});
  }
  const ScenarioMap map = open_map(crossings);
  int met3 = 0;
  for (int i = 0; i < 20000; ++i) {
    const EntityState v = vehicle("v", {u(eng), u(eng)}, h(eng));
    const Point ped{u(eng), u(eng)};
    bool prev = true;
    for (int a = 0; a <= 3; ++a) {
      const bool now = condition(alg(a, 40.0, 10.0), v, ped, map);
      EXPECT_TRUE(prev || !now) << "alg " << a;
      prev = now;
    }
    met3 += prev ? 1 : 0;
  }
  EXPECT_GT(met3, 50);
}

}  // namespace
}  // namespace p2v
