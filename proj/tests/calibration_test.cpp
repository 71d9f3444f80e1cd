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


#include "p2v/calibration.hpp"
#include "p2v/metrics.hpp"

#include <gtest/gtest.h>

namespace p2v
{
namespace
{

CalibrationInputs inputs(double s, double decel = 5.0, double tr = 0.5, double ped = 1.6)
{
  CalibrationInputs in;
  in.reaction_time = tr;
  in.vehicle_speed = s;
  in.pedestrian_speed = ped;
  in.deceleration = decel;
  return in;
}

TEST(MinAlertDistance, SixtyKilometresPerHour)
{
  EXPECT_NEAR(min_alert_distance(inputs(60.0 / 3.6)), 36.11, 0.01);
  EXPECT_NEAR(min_alert_distance(inputs(16.67)), 8.335 + 16.67 * 16.67 / 10.0, 1e-12);
}

TEST(MinAlertDistance, SpecialCases)
{
  EXPECT_DOUBLE_EQ(min_alert_distance(inputs(0.0)), 0.0);
  EXPECT_DOUBLE_EQ(min_alert_distance(inputs(10.0, 5.0, 0.0)), 10.0);
}

TEST(MinPedestrianSafety, Examples)
{
  EXPECT_NEAR(min_pedestrian_safety_threshold(inputs(16.67)), 6.13, 0.005);
  EXPECT_NEAR(min_pedestrian_safety_threshold(inputs(7.5, 5.0, 0.5, 1.0)), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(min_pedestrian_safety_threshold(inputs(0.0, 5.0, 0.0)), 0.0);
}

TEST(Calibration, MonotoneInSpeedAndDeceleration)
{
  double prev = -1.0;
  for (double s = 0.0; s <= 30.0; s += 0.5) {
    const double d = min_alert_distance(inputs(s));
    EXPECT_GT(d, prev);
    prev = d;
    EXPECT_GE(min_alert_distance(inputs(s, 3.0)), min_alert_distance(inputs(s, 6.0)));
  }
}

TEST(Calibration, AlertDistanceGivesTargetDeceleration)
{
  // An alert fired at exactly the minimum distance needs exactly the target braking rate.
  for (double s : {5.0, 10.0, 16.67, 25.0}) {
    for (double a : {2.0, 5.0, 8.0}) {
      const double d = min_alert_distance(inputs(s, a));
      const auto t = deceleration_terms(s, d, 1e9, 1.6, 0.5);
      ASSERT_TRUE(t.stop_before_pedestrian.has_value());
      EXPECT_NEAR(*t.stop_before_pedestrian, a, 1e-9);
    }
  }
}

TEST(Calibration, SafetyThresholdGivesTargetDeceleration)
{
  for (double s : {5.0, 10.0, 16.67}) {
    const double th_ps = min_pedestrian_safety_threshold(inputs(s));
    const auto t = deceleration_terms(s, 0.0, th_ps, 1.6, 0.5);
    ASSERT_TRUE(t.stop_before_crossing.has_value());
    EXPECT_NEAR(*t.stop_before_crossing, 5.0, 1e-9);
  }
}

TEST(Calibration, InvalidInputsRejected)
{
  EXPECT_THROW(inputs(16.67, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(inputs(16.67, -1.0).validate(), std::invalid_argument);
  EXPECT_THROW(inputs(-1.0).validate(), std::invalid_argument);
  EXPECT_THROW(inputs(16.67, 5.0, -0.1).validate(), std::invalid_argument);
  EXPECT_THROW(inputs(16.67, 5.0, 0.5, 0.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(inputs(0.0, 5.0, 0.0).validate());
}

}  // namespace
}  // namespace p2v
