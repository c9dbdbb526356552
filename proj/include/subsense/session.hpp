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

// One teleoperation session advanced in fixed ticks. Each tick runs, in
// order:
//   1. drain operator input messages
//   2. input mapping -> vehicle setpoint
//   3. gripper controller step -> optional pwm command
//   4. commands encoded, bridged and decoded at the vehicle
//   5. plant tick
//   6. sensor frame encoded at the vehicle, bridged and decoded at the host
//   7. haptic update from the decoded grasp button
//   8. snapshot published

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "subsense/gripper_control.hpp"
#include "subsense/haptics.hpp"
#include "subsense/input_mapping.hpp"
#include "subsense/plant.hpp"
#include "subsense/scenario.hpp"
#include "subsense/task.hpp"
#include "subsense/wire.hpp"

namespace subsense::gateway {

struct GloveInput {
  int raw = 0;
  bool operator==(const GloveInput&) const = default;
};

struct ControllerMessage {
  input::ControllerInputs axes;
  bool operator==(const ControllerMessage& o) const {
    return axes.joy_x == o.axes.joy_x && axes.joy_y == o.axes.joy_y && axes.finger_trigger == o.axes.finger_trigger &&
           axes.grip_trigger == o.axes.grip_trigger;
  }
};

struct HmdMessage {
  input::HmdPose pose;
  bool operator==(const HmdMessage& o) const {
    return pose.roll_deg == o.pose.roll_deg && pose.pitch_deg == o.pose.pitch_deg && pose.yaw_deg == o.pose.yaw_deg;
  }
};

enum class AdminAction { kReset, kInterventionAck };

struct AdminMessage {
  AdminAction action = AdminAction::kReset;
  bool operator==(const AdminMessage&) const = default;
};

using InputMessage = std::variant<GloveInput, ControllerMessage, HmdMessage, AdminMessage>;

struct DiscSnapshot {
  plant::DiscLocation location = plant::DiscLocation::kOnPole;
  int pole = 0;
  int level = 0;
  plant::Vec3 center;
  bool operator==(const DiscSnapshot&) const = default;
};

/// Counters shown with the task state. Elapsed time is derived from the tick
/// index and `session_start_tick`.
struct MetricCounters {
  int subtasks_completed = 0;
  int minor = 0;
  int major = 0;
  int collisions = 0;
  int interventions = 0;
  bool completed = false;
  bool operator==(const MetricCounters&) const = default;
};

/// Immutable state of one tick. All fields come from the same tick.
struct StateSnapshot {
  std::uint64_t tick = 0;
  std::uint64_t session_start_tick = 0;
  double tick_ms = 20.0;
  plant::VehiclePose vehicle;
  plant::Vec3 jaw;
  double gripper_position = 0.0;  // normalised, from the decoded sensor frame
  double glove_position = 0.0;
  bool button = false;
  bool vibrating = false;
  double camera_tilt_deg = 0.0;
  input::VehicleSetpoint setpoint;
  bool shifted = false;
  std::optional<int> gripper_pwm_us;  // command emitted this tick, if any
  std::array<DiscSnapshot, 3> discs;
  MetricCounters metrics;
  int pipeline_latency_ticks = 0;
  double pipeline_latency_ms = 0.0;
  std::vector<plant::PlantEvent> events;  // plant events raised this tick

  double elapsed_s() const { return static_cast<double>(tick - session_start_tick) * tick_ms / 1000.0; }
  /// Equality on everything except the tick index.
  bool SameStateAs(const StateSnapshot& o) const;
};

struct LinkStats {
  wire::BridgeStats uplink;    // vehicle -> host sensor frames
  wire::BridgeStats downlink;  // host -> vehicle commands
  std::uint64_t sensor_decode_errors = 0;
  std::uint64_t command_decode_errors = 0;
  std::uint64_t sensor_seq_missing = 0;
};

class Session {
 public:
  explicit Session(Scenario scenario, wire::ClockMs clock = wire::SteadyClockMs);

  /// Runs one tick with the inputs received since the previous tick.
  const StateSnapshot& Tick(std::span<const InputMessage> inputs);
  const StateSnapshot& Tick() { return Tick({}); }

  const StateSnapshot& snapshot() const { return snapshot_; }
  const Scenario& scenario() const { return scenario_; }
  const plant::PlantWorld& world() const { return *world_; }
  const harness::MetricsTracker& tracker() const { return tracker_; }
  harness::TaskMetrics Metrics() const;
  LinkStats link_stats() const;
  std::uint64_t tick_index() const { return tick_; }
  std::int64_t now_ms() const;

  /// Corrupts the next uplink sensor frame in flight; for fault injection.
  void CorruptNextSensorFrame() { corrupt_next_sensor_ = true; }

 private:
  void ApplyInput(const InputMessage& msg, std::vector<plant::PlantEvent>& admin_events);
  void ResetPlant();
  void Publish(const std::optional<gripper::PwmCommand>& cmd, std::vector<plant::PlantEvent> events);

  Scenario scenario_;
  std::optional<plant::PlantWorld> world_;
  gripper::GripperController controller_;
  haptics::HapticDriver haptics_;
  harness::MetricsTracker tracker_;
  wire::Bridge uplink_;
  wire::Bridge downlink_;
  wire::SequenceTracker sensor_seq_;
  std::uint64_t sensor_decode_errors_ = 0;
  std::uint64_t command_decode_errors_ = 0;

  // Operator input state, latest value wins.
  std::optional<int> glove_raw_;
  input::ControllerInputs controller_in_;
  input::HmdPose hmd_;
  std::optional<std::uint64_t> last_input_tick_;

  // Host-side view of the vehicle, from decoded sensor frames.
  double gripper_measured_ = 0.0;
  bool button_measured_ = false;

  // Vehicle-side state, from decoded command frames.
  input::VehicleSetpoint vehicle_setpoint_;
  std::optional<double> last_camera_sent_;

  std::uint8_t command_seq_ = 0;
  std::uint8_t sensor_seq_out_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t session_start_tick_ = 0;
  bool corrupt_next_sensor_ = false;
  StateSnapshot snapshot_;
};

/// Camera mount servo width for a tilt angle, 1500 us at level.
int CameraTiltToPwm(double tilt_deg);
double CameraPwmToTilt(int width_us);

}  // namespace subsense::gateway
