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

#include <stdexcept>

namespace p2v
{

struct CalibrationInputs
{
  double reaction_time{0.5};      // s
  double vehicle_speed{16.67};    // m/s, initial speed when the alert fires
  double pedestrian_speed{1.6};   // m/s
  double deceleration{5.0};       // m/s^2, target braking rate

  /// Throws std::invalid_argument unless decel > 0, s_ped > 0, s_iveh >= 0 and tr >= 0.
  void validate() const;
};

/// Reaction distance plus braking distance: the smallest alert distance that lets the
/// vehicle stop at no more than the target deceleration.
double min_alert_distance(const CalibrationInputs & in);

/// Pedestrian-to-crossing distance whose walking time leaves the vehicle enough time to
/// stop at the target deceleration after reacting: s_ped * (s_veh / decel + tr).
double min_pedestrian_safety_threshold(const CalibrationInputs & in);

}  // namespace p2v
