// Copyright 2026 The SubSense Authors.
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

namespace subsense::input {

inline constexpr double kDefaultShiftThreshold = 0.95;
inline constexpr double kDefaultThetaMaxDeg = 30.0;
inline constexpr double kCameraTiltLimitDeg = 45.0;

/// Left hand-controller state. Axes are clamped by Clamped().
struct ControllerInputs {
  double joy_x = 0.0;           // [-1, 1]
  double joy_y = 0.0;           // [-1, 1]
  double finger_trigger = 0.0;  // [0, 1]
  double grip_trigger = 0.0;    // [0, 1], shift modifier

  ControllerInputs Clamped() const;
};

/// Head pose in degrees. Angles are wrapped to (-180, 180] by Normalized().
struct HmdPose {
  double roll_deg = 0.0;  // + = head tilted right
  double pitch_deg = 0.0; // + = up
  double yaw_deg = 0.0;

  HmdPose Normalized() const;
};

/// Fractions of maximum thruster output per axis, plus camera mount angle.
struct VehicleSetpoint {
  double surge = 0.0;
  double sway = 0.0;
  double heave = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double camera_tilt_deg = 0.0;

  bool operator==(const VehicleSetpoint&) const = default;
};

/// Axes driven by the hand controller. Yaw and camera come from the head.
struct ControllerSetpoint {
  double surge = 0.0;
  double sway = 0.0;
  double heave = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  bool shifted = false;
};

struct HmdSetpoint {
  double yaw = 0.0;
  double camera_tilt_deg = 0.0;
};

double WrapDegrees(double deg);

/// Unshifted: joystick x/y drive sway/heave and the finger trigger drives
/// forward surge. With the grip trigger held past `shift_threshold` the
/// joystick drives roll/pitch and the finger trigger drives reverse surge.
ControllerSetpoint MapController(const ControllerInputs& in, double shift_threshold = kDefaultShiftThreshold);

/// Head roll proportional to yaw rate (saturating at theta_max_deg); head
/// pitch drives the camera mount 1:1 within +/-45 degrees.
HmdSetpoint MapHmd(const HmdPose& pose, double theta_max_deg = kDefaultThetaMaxDeg);

VehicleSetpoint MergeSetpoints(const ControllerSetpoint& ctrl, const HmdSetpoint& hmd);

}  // namespace subsense::input
