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

#include "subsense/input_mapping.hpp"

#include <algorithm>
#include <cmath>

namespace subsense::input {

namespace {

double ClampFinite(double v, double lo, double hi) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, lo, hi);
}

}  // namespace

ControllerInputs ControllerInputs::Clamped() const {
  return {ClampFinite(joy_x, -1.0, 1.0), ClampFinite(joy_y, -1.0, 1.0), ClampFinite(finger_trigger, 0.0, 1.0),
          ClampFinite(grip_trigger, 0.0, 1.0)};
}

double WrapDegrees(double deg) {
  if (!std::isfinite(deg)) return 0.0;
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

HmdPose HmdPose::Normalized() const { return {WrapDegrees(roll_deg), WrapDegrees(pitch_deg), WrapDegrees(yaw_deg)}; }

ControllerSetpoint MapController(const ControllerInputs& raw, double shift_threshold) {
  const ControllerInputs in = raw.Clamped();
  ControllerSetpoint sp;
  sp.shifted = in.grip_trigger >= shift_threshold;
  if (sp.shifted) {
    sp.roll = in.joy_x;
    sp.pitch = in.joy_y;
    sp.surge = -in.finger_trigger;
  } else {
    sp.sway = in.joy_x;
    sp.heave = in.joy_y;
    sp.surge = in.finger_trigger;
  }
  return sp;
}

HmdSetpoint MapHmd(const HmdPose& raw, double theta_max_deg) {
  const HmdPose pose = raw.Normalized();
  if (!(theta_max_deg > 0.0)) theta_max_deg = kDefaultThetaMaxDeg;
  return {std::clamp(pose.roll_deg / theta_max_deg, -1.0, 1.0),
          std::clamp(pose.pitch_deg, -kCameraTiltLimitDeg, kCameraTiltLimitDeg)};
}

VehicleSetpoint MergeSetpoints(const ControllerSetpoint& ctrl, const HmdSetpoint& hmd) {
  VehicleSetpoint out;
  out.surge = std::clamp(ctrl.surge, -1.0, 1.0);
  out.sway = std::clamp(ctrl.sway, -1.0, 1.0);
  out.heave = std::clamp(ctrl.heave, -1.0, 1.0);
  out.roll = std::clamp(ctrl.roll, -1.0, 1.0);
  out.pitch = std::clamp(ctrl.pitch, -1.0, 1.0);
  out.yaw = std::clamp(hmd.yaw, -1.0, 1.0);
  out.camera_tilt_deg = std::clamp(hmd.camera_tilt_deg, -kCameraTiltLimitDeg, kCameraTiltLimitDeg);
  return out;
}

}  // namespace subsense::input
