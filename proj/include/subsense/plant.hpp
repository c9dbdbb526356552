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

// Deterministic simulated plant: gripper actuator, kinematic vehicle and
// the Tower-of-Hanoi workspace.
//
// World frame: x along the tank length, y across, z up from the tank floor.
// Yaw 0 faces +x. Units are metres, degrees and milliseconds throughout.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "subsense/gripper_control.hpp"
#include "subsense/input_mapping.hpp"

namespace subsense::plant {

using TimestampMs = std::int64_t;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double Norm() const { return std::sqrt(x * x + y * y + z * z); }
  double HorizontalNorm() const { return std::hypot(x, y); }
  bool operator==(const Vec3&) const = default;
};

// -- gripper -----------------------------------------------------------------

struct GripperParams {
  double rate_max = 2.0;             // full travel per second at full authority
  double noise_sigma = 0.01;         // measurement noise, closure fraction
  double actuation_latency_ms = 50.0;
  // Rate multiplier while closing past the contact point of a held disc.
  double squeeze_rate_factor = 0.3;
};

/// Signed closure rate (fraction/s) for a pulse width: positive closes,
/// zero inside the 30 us dead zone around neutral.
double GripperRate(int width_us, double rate_max);

class GripperPlant {
 public:
  GripperPlant(GripperParams params, std::uint64_t seed, double initial_position = 0.0);

  /// Advances `dt_ms`. An incoming command takes effect after the actuation
  /// latency; motion is integrated exactly between command switch times.
  void Tick(std::optional<gripper::PwmCommand> incoming, double dt_ms);

  /// Closure at which the jaws meet a held object, or nullopt when empty.
  void SetContact(std::optional<double> contact_position) { contact_ = contact_position; }

  double true_position() const { return position_; }
  double reported_position() const { return reported_; }
  int active_pwm_us() const { return active_pwm_us_; }
  double time_ms() const { return time_ms_; }
  const GripperParams& params() const { return params_; }

 private:
  void Integrate(double duration_ms);

  GripperParams params_;
  double position_;
  double reported_;
  int active_pwm_us_ = gripper::kPwmNeutralUs;
  double time_ms_ = 0.0;
  std::optional<double> contact_;
  std::deque<std::pair<double, int>> pending_;  // (effective time, width)
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

// -- vehicle -----------------------------------------------------------------

struct TankBounds {
  double length = 3.048;  // 10 ft
  double width = 1.829;   // 6 ft
  double depth = 1.524;   // 5 ft
};

struct VehicleParams {
  double v_surge = 0.5;
  double v_sway = 0.4;
  double v_heave = 0.3;
  double yaw_rate_max = 45.0;       // deg/s
  double attitude_rate_max = 45.0;  // deg/s, roll and pitch
  Vec3 half_extent{0.23, 0.17, 0.13};
  Vec3 jaw_offset{0.30, 0.0, -0.10};  // body frame, forward/left/up
};

struct VehiclePose {
  Vec3 position;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  bool operator==(const VehiclePose&) const = default;
};

struct VehicleTickResult {
  bool contact = false;      // clamped against a wall this tick
  bool new_contact = false;  // first tick of a contact episode
  Vec3 velocity;             // world frame, m/s, after clamping
};

class VehiclePlant {
 public:
  VehiclePlant(VehicleParams params, TankBounds tank, VehiclePose initial);

  /// Body-frame velocities scale with the setpoint axes; Euler-integrated,
  /// then clamped into the tank.
  VehicleTickResult Tick(const input::VehicleSetpoint& sp, double dt_ms);

  const VehiclePose& pose() const { return pose_; }
  Vec3 JawPosition() const;
  bool in_contact() const { return in_contact_; }
  const VehicleParams& params() const { return params_; }
  const TankBounds& tank() const { return tank_; }

 private:
  VehicleParams params_;
  TankBounds tank_;
  VehiclePose pose_;
  bool in_contact_ = false;
};

/// Rotates a body-frame vector by yaw (degrees) into the world frame.
Vec3 BodyToWorld(const Vec3& body, double yaw_deg);
Vec3 WorldToBody(const Vec3& world, double yaw_deg);

// -- workspace ---------------------------------------------------------------

struct DiscSpec {
  std::string name;
  double outer_radius = 0.05;
  double hole_radius = 0.02;
  double thickness = 0.025;
  double connector_width = 0.03;
};

struct PoleSpec {
  Vec3 base;  // centre of the pole foot, on the platform top
  double height = 0.3048;
  double radius = 0.0095;
};

struct WorkspaceConfig {
  std::array<PoleSpec, 3> poles;
  std::array<DiscSpec, 3> discs;  // index 0 = small, 2 = large
  int start_pole = 0;
  int target_pole = 2;
  double jaw_gap_open = 0.08;         // jaw opening at closure 0
  double capture_radius = 0.02;       // jaw-to-connector distance for a grasp
  double connector_standoff = 0.012;  // connector tab beyond the disc rim
  double place_tolerance = 0.01;      // extra horizontal slack when threading a pole
  double jaw_radius = 0.015;

  static WorkspaceConfig Default();
};

enum class DiscLocation { kOnPole, kGrasped, kLoose };

struct DiscState {
  DiscLocation location = DiscLocation::kOnPole;
  int pole = 0;
  int level = 0;
  Vec3 center;  // disc centre; tracks the jaw while grasped
  int origin_pole = 0;
};

class TohWorkspace {
 public:
  explicit TohWorkspace(WorkspaceConfig cfg);

  const WorkspaceConfig& config() const { return cfg_; }
  const std::array<DiscState, 3>& discs() const { return discs_; }
  /// Stack of disc ids on a pole, bottom first.
  const std::vector<int>& stack(int pole) const { return stacks_.at(pole); }
  std::optional<int> grasped() const;

  /// Closure fraction at which the jaw gap equals the disc connector width.
  double ContactPosition(int disc) const;
  Vec3 ConnectorPosition(int disc) const;
  /// Disc ids that may be grasped: the top of every non-empty stack.
  std::vector<int> GraspableDiscs() const;
  /// Horizontal slack for threading `disc` onto any pole.
  double ThreadClearance(int disc) const;
  /// Pole whose capture region contains the disc centre, if any.
  std::optional<int> CapturingPole(int disc) const;
  double StackTopZ(int pole) const;

  void Grasp(int disc, const Vec3& jaw);
  void MoveGrasped(const Vec3& jaw);
  /// Releases the held disc; it lands on a capturing pole or becomes loose.
  DiscState Release();
  /// Returns loose discs to the top of the pole they were taken from.
  std::vector<int> RestoreLoose();

  /// Total count of discs across all states; always 3.
  int DiscCount() const;

 private:
  void Restack(int pole);

  WorkspaceConfig cfg_;
  std::array<DiscState, 3> discs_;
  std::array<std::vector<int>, 3> stacks_;
  Vec3 grasp_offset_;  // disc centre minus jaw at grasp time
};

// -- damage ledger -------------------------------------------------------------

enum class EventKind {
  kGrasp,
  kPlace,
  kLoose,
  kMinorDamage,
  kMajorDamage,
  kCollision,
  kIntervention,
  kRestore,
};

const char* ToString(EventKind k);

struct PlantEvent {
  TimestampMs time_ms = 0;
  EventKind kind = EventKind::kGrasp;
  std::string detail;
  int disc = -1;
  int pole = -1;

  bool operator==(const PlantEvent&) const = default;
};

struct DamageThresholds {
  double minor = 0.08;             // overgrip past contact
  double major = 0.15;
  double collision_speed = 0.15;   // m/s
};

struct DamageLedger {
  int minor = 0;
  int major = 0;
  int collisions = 0;
  int interventions = 0;
  std::vector<PlantEvent> events;

  void Record(PlantEvent e);
  bool operator==(const DamageLedger&) const = default;
};

// -- world -----------------------------------------------------------------------

struct PlantConfig {
  GripperParams gripper;
  VehicleParams vehicle;
  TankBounds tank;
  WorkspaceConfig workspace = WorkspaceConfig::Default();
  DamageThresholds damage;
  VehiclePose initial_pose{{1.6, 0.9145, 0.45}, 0.0, 0.0, 0.0};
  double initial_gripper = 0.0;
  std::uint64_t seed = 1;
};

/// Everything the plant reports back for one tick.
struct PlantStepResult {
  bool button = false;
  std::vector<PlantEvent> events;
};

/// The full simulated vehicle side. One owner at a time.
class PlantWorld {
 public:
  explicit PlantWorld(PlantConfig cfg);

  PlantStepResult Tick(std::optional<gripper::PwmCommand> gripper_cmd, const input::VehicleSetpoint& sp,
                       double dt_ms);

  /// Admin acknowledgement of an intervention: loose discs are restored.
  std::vector<PlantEvent> AcknowledgeIntervention();

  const GripperPlant& gripper() const { return gripper_; }
  const VehiclePlant& vehicle() const { return vehicle_; }
  const TohWorkspace& workspace() const { return workspace_; }
  const DamageLedger& ledger() const { return ledger_; }
  const PlantConfig& config() const { return cfg_; }
  bool button() const { return button_; }
  double camera_tilt_deg() const { return camera_tilt_deg_; }
  void SetCameraTilt(double deg) { camera_tilt_deg_ = deg; }
  TimestampMs time_ms() const { return time_ms_; }

 private:
  void CheckGrasp(std::vector<PlantEvent>& events);
  void CheckDamage(const Vec3& jaw_velocity, const Vec3& vehicle_velocity, std::vector<PlantEvent>& events);
  void Emit(std::vector<PlantEvent>& events, EventKind kind, std::string detail, int disc = -1, int pole = -1);

  PlantConfig cfg_;
  GripperPlant gripper_;
  VehiclePlant vehicle_;
  TohWorkspace workspace_;
  DamageLedger ledger_;
  TimestampMs time_ms_ = 0;
  bool button_ = false;
  double camera_tilt_deg_ = 0.0;
  double prev_closure_ = 0.0;
  bool minor_flagged_ = false;
  bool major_flagged_ = false;
  std::array<bool, 3> jaw_pole_contact_{};
  std::array<bool, 3> disc_pole_contact_{};
  bool body_pole_contact_ = false;
};

}  // namespace subsense::plant
