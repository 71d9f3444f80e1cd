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

namespace p2v
{

void CalibrationInputs::validate() const
{
  if (!(deceleration > 0.0)) {
    throw std::invalid_argument("calibrate: deceleration must be positive");
  }
  if (!(pedestrian_speed > 0.0)) {
    throw std::invalid_argument("calibrate: pedestrian speed must be positive");
  }
  if (!(vehicle_speed >= 0.0)) {
    throw std::invalid_argument("calibrate: vehicle speed must not be negative");
  }
  if (!(reaction_time >= 0.0)) {
    throw std::invalid_argument("calibrate: reaction time must not be negative");
  }
}

double min_alert_distance(const CalibrationInputs & in)
{
  const double s = in.vehicle_speed;
  return in.reaction_time * s + 0.5 * s * s / in.deceleration;
}

double min_pedestrian_safety_threshold(const CalibrationInputs & in)
{
  // decel = s / (t_pc - tr) with t_pc = th_ps / s_ped, solved for th_ps.
  const double t_pc = in.vehicle_speed / in.deceleration + in.reaction_time;
  return in.pedestrian_speed * t_pc;
}

}  // namespace p2v
