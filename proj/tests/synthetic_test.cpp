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


#include "p2v/synthetic.hpp"

#include "p2v/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace p2v
{
namespace
{

SyntheticParams small_world(std::uint64_t seed = 3)
{
  SyntheticParams p;
  p.blocks_x = 2;
  p.blocks_y = 2;
  p.block_size = 120.0;
  p.duration = 120.0;
  p.warmup = 60.0;
  p.vehicle_interarrival = 5.0;
  p.pedestrian_interarrival = 4.0;
  p.seed = seed;
  return p;
}

std::string csv_of(const TraceSequence & trace)
{
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

TEST(Synthetic, SameSeedIsByteIdentical)
{
  ScenarioMap m1;
  ScenarioMap m2;
  const auto a = generate_synthetic(small_world(), m1);
  const auto b = generate_synthetic(small_world(), m2);
  EXPECT_EQ(csv_of(a), csv_of(b));
  EXPECT_EQ(m1, m2);
}

TEST(Synthetic, DifferentSeedsDiffer)
{
  ScenarioMap m;
  EXPECT_NE(csv_of(generate_synthetic(small_world(3), m)), csv_of(generate_synthetic(small_world(4), m)));
}

TEST(Synthetic, PedestrianCountMatchesInterarrival)
{
  // 12 s interarrival over an hour: 300 expected, 3 sigma is about 50.
  SyntheticParams p;
  p.duration = 3600.0;
  p.warmup = 0.0;
  p.pedestrian_interarrival = 12.0;
  p.vehicle_interarrival = 60.0;
  ScenarioMap m;
  const auto trace = generate_synthetic(p, m);
  const auto peds = static_cast<double>(trace.count(EntityKind::pedestrian));
  EXPECT_NEAR(peds, 300.0, 3.0 * std::sqrt(3600.0 * (1.0 / 12.0) * (11.0 / 12.0)));
}

TEST(Synthetic, GridMapShape)
{
  const SyntheticParams p = small_world();
  const ScenarioMap map = build_grid_map(p);
  EXPECT_EQ(map.buildings().size(), 4u);
  EXPECT_EQ(map.crossings().size(), 4u * 9u);
  for (const Crossing & c : map.crossings()) {
    EXPECT_NEAR(distance(c.span.a, c.span.b), 2.0 * p.layout.sidewalk_offset, 1e-9);
  }
}

TEST(Synthetic, KinematicInvariants)
{
  const SyntheticParams p = small_world(5);
  ScenarioMap map;
  const auto trace = generate_synthetic(p, map);
  ASSERT_GT(trace.count(EntityKind::vehicle), 5u);
  ASSERT_GT(trace.count(EntityKind::pedestrian), 5u);
  const double lo = p.ped_target_speed * 0.8 - 1e-9;
  const double vmax = 2.0 * p.speed_limit;
  const Frame * prev = nullptr;
  for (const Frame & f : trace.frames()) {
    for (const EntityState & s : f.states) {
      EXPECT_TRUE(map.bounds().contains(s.pos)) << s.id;
      for (const Building & b : map.buildings()) {
        ASSERT_FALSE(strictly_inside(s.pos, b.outline)) << s.id << " inside " << b.id;
      }
      if (s.kind == EntityKind::pedestrian) {
        ASSERT_GE(s.speed, lo) << s.id;
        ASSERT_LE(s.speed, p.ped_target_speed + 1e-9) << s.id;
      } else {
        ASSERT_GE(s.speed, 0.0);
        ASSERT_LE(s.speed, vmax);
      }
      if (prev != nullptr) {
        if (const EntityState * before = prev->find(s.id)) {
          // Displacement never exceeds the reported speed by more than rounding.
          EXPECT_LE(distance(before->pos, s.pos), s.speed * p.step + 1e-6) << s.id << " t=" << f.t;
        }
      }
    }
    prev = &f;
  }
}

TEST(Synthetic, WarmupStartsPopulated)
{
  ScenarioMap map;
  const auto trace = generate_synthetic(small_world(), map);
  EXPECT_FALSE(trace.frames().front().states.empty());
  EXPECT_EQ(trace.first_tick(), 0);
}

TEST(Synthetic, ParamsJsonRoundTrip)
{
  SyntheticParams p = small_world(9);
  p.layout.turn_speed = 4.25;
  const SyntheticParams back = synthetic_params_from_json(to_json(p));
  EXPECT_EQ(to_json(back), to_json(p));
}

TEST(Synthetic, InvalidParamsRejected)
{
  SyntheticParams p = small_world();
  p.block_size = 20.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = small_world();
  p.vehicle_interarrival = 0.5;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_THROW(synthetic_params_from_json({{"duration", -1.0}}), ConfigError);
}

TEST(Synthetic, ArrivalRateIsOnePerInterarrival)
{
  auto eng = rng::stream(1, "test");
  const auto arrivals = arrival_seconds(eng, 7.2, 72000.0);
  EXPECT_NEAR(static_cast<double>(arrivals.size()), 10000.0, 300.0);
  EXPECT_TRUE(std::is_sorted(arrivals.begin(), arrivals.end()));
}

TEST(Synthetic, SpeedSamplersStayInRange)
{
  auto eng = rng::stream(1, "speeds");
  for (int i = 0; i < 10000; ++i) {
    const double v = sample_vehicle_max_speed(eng, 13.89);
    EXPECT_GE(v, 0.2 * 13.89);
    EXPECT_LE(v, 2.0 * 13.89);
    const double s = sample_pedestrian_step_speed(eng, 1.6);
    EXPECT_GE(s, 1.28 - 1e-12);
    EXPECT_LE(s, 1.6);
  }
}

}  // namespace
}  // namespace p2v
