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

#include <algorithm>
#include <cmath>

#include "subsense/harness.hpp"

namespace subsense::harness {

namespace {

using gateway::InputMessage;
using plant::Vec3;

// Waypoint tracking gains and limits. Speeds stay well below the collision
// threshold so any accidental contact is gentle.
constexpr double kGain = 1.5;                 // 1/s
constexpr double kHorizontalSpeedCap = 0.10;  // m/s
constexpr double kVerticalSpeedCap = 0.08;    // m/s
constexpr double kArriveTolerance = 0.003;    // m
constexpr double kClearance = 0.04;           // disc bottom above pole tops while carrying
constexpr double kPlaceGap = 0.01;            // disc bottom above the stack when releasing
constexpr double kGraspMargin = 0.05;         // glove target past contact when closing
constexpr double kGraspStep = 0.01;
constexpr double kGraspMarginMax = 0.07;
constexpr double kReleaseMargin = 0.25;       // glove target below contact when opening
constexpr int kSettleTicks = 15;
constexpr int kGraspRetryTicks = 100;
constexpr double kCameraPitchDeg = -30.0;

enum class Phase { kOpen, kRise, kHover, kDescend, kClose, kLift, kTraverse, kLower, kRelease, kDone };

}  // namespace

struct AutopilotOperator::Impl {
  explicit Impl(const Scenario& s) : scenario(s), moves(SolveHanoi(3, s.plant.workspace.start_pole, s.plant.workspace.target_pole)) {}

  Scenario scenario;
  std::vector<std::pair<int, int>> moves;
  std::size_t move_index = 0;
  Phase phase = Phase::kOpen;
  int disc = -1;
  int phase_ticks = 0;
  int settled_ticks = 0;
  double grasp_margin = kGraspMargin;

  std::optional<int> sent_glove;
  std::optional<gateway::ControllerMessage> sent_controller;
  bool sent_hmd = false;

  const plant::WorkspaceConfig& ws() const { return scenario.plant.workspace; }

  double SafeJawZ(int d) const {
    double top = 0.0;
    for (const auto& p : ws().poles) top = std::max(top, p.base.z + p.height);
    return top + ws().discs[d].thickness / 2.0 + kClearance;
  }

  // Offset from jaw to disc centre while the connector sits between the jaws.
  Vec3 ConnectorOffset(int d) const { return {ws().discs[d].outer_radius + ws().connector_standoff, 0.0, 0.0}; }

  double StackTopZ(const gateway::StateSnapshot& s, int pole) const {
    double z = ws().poles[pole].base.z;
    for (int d = 0; d < 3; ++d) {
      if (s.discs[d].location == plant::DiscLocation::kOnPole && s.discs[d].pole == pole) z += ws().discs[d].thickness;
    }
    return z;
  }

  int TopDisc(const gateway::StateSnapshot& s, int pole) const {
    int best = -1;
    int level = -1;
    for (int d = 0; d < 3; ++d) {
      const auto& disc = s.discs[d];
      if (disc.location == plant::DiscLocation::kOnPole && disc.pole == pole && disc.level > level) {
        best = d;
        level = disc.level;
      }
    }
    return best;
  }

  double ContactPosition(int d) const { return 1.0 - ws().discs[d].connector_width / ws().jaw_gap_open; }

  int GloveRaw(double closure) const {
    return gripper::Denormalize(gripper::NormalizedPosition(closure), scenario.glove);
  }

  Vec3 Target(const gateway::StateSnapshot& s) const {
    const auto [from, to] = moves[move_index];
    const Vec3& jaw = s.jaw;
    switch (phase) {
      case Phase::kRise:
        return {jaw.x, jaw.y, SafeJawZ(disc)};
      case Phase::kHover: {
        const Vec3 c = s.discs[disc].center - ConnectorOffset(disc);
        return {c.x, c.y, SafeJawZ(disc)};
      }
      case Phase::kDescend:
        return s.discs[disc].center - ConnectorOffset(disc);
      case Phase::kLift:
        return {jaw.x, jaw.y, SafeJawZ(disc)};
      case Phase::kTraverse: {
        const Vec3 axis = ws().poles[to].base - ConnectorOffset(disc);
        return {axis.x, axis.y, SafeJawZ(disc)};
      }
      case Phase::kLower: {
        const Vec3 axis = ws().poles[to].base - ConnectorOffset(disc);
        return {axis.x, axis.y, StackTopZ(s, to) + kPlaceGap + ws().discs[disc].thickness / 2.0};
      }
      default:
        return jaw;
    }
  }

  gateway::ControllerMessage Drive(const gateway::StateSnapshot& s, const Vec3& target) const {
    const Vec3 err_world = target - s.jaw;
    const Vec3 err = plant::WorldToBody(err_world, s.vehicle.yaw);
    const auto& v = scenario.plant.vehicle;
    auto speed = [](double e, double cap) { return std::clamp(kGain * e, -cap, cap); };
    const double vx = speed(err.x, kHorizontalSpeedCap);
    const double vy = speed(err.y, kHorizontalSpeedCap);
    const double vz = speed(err.z, kVerticalSpeedCap);

    gateway::ControllerMessage m;
    // Reverse surge needs the shift modifier, which repurposes the stick.
    if (vx < 0.0 && std::abs(err.x) > kArriveTolerance / 2.0) {
      m.axes.grip_trigger = 1.0;
      m.axes.finger_trigger = std::min(1.0, -vx / v.v_surge);
      return m;
    }
    m.axes.finger_trigger = std::max(0.0, vx / v.v_surge);
    m.axes.joy_x = vy / v.v_sway;
    m.axes.joy_y = vz / v.v_heave;
    return m;
  }

  static double Round3(double x) { return std::round(x * 1000.0) / 1000.0; }

  void Enter(Phase p) {
    phase = p;
    phase_ticks = 0;
    settled_ticks = 0;
  }

  std::vector<InputMessage> Poll(const gateway::StateSnapshot& s) {
    std::vector<InputMessage> out;
    if (!sent_hmd) {
      gateway::HmdMessage h;
      h.pose.pitch_deg = kCameraPitchDeg;
      out.push_back(h);
      sent_hmd = true;
    }
    ++phase_ticks;

    std::optional<double> glove_target;
    gateway::ControllerMessage ctrl;
    bool moving = false;

    if (phase != Phase::kDone && move_index >= moves.size()) Enter(Phase::kDone);

    switch (phase) {
      case Phase::kOpen:
        disc = TopDisc(s, moves[move_index].first);
        grasp_margin = kGraspMargin;
        glove_target = ContactPosition(disc) - kReleaseMargin;
        if (s.gripper_position < *glove_target + 0.05) Enter(Phase::kRise);
        break;
      case Phase::kRise:
      case Phase::kHover:
      case Phase::kDescend:
      case Phase::kLift:
      case Phase::kTraverse:
      case Phase::kLower: {
        const Vec3 target = Target(s);
        ctrl = Drive(s, target);
        moving = true;
        if ((target - s.jaw).Norm() < kArriveTolerance) {
          if (++settled_ticks >= 2) {
            static constexpr Phase kNext[] = {Phase::kOpen,  Phase::kHover,    Phase::kDescend, Phase::kClose,
                                              Phase::kClose, Phase::kTraverse, Phase::kLower,   Phase::kRelease};
            Enter(kNext[static_cast<int>(phase)]);
          }
        } else {
          settled_ticks = 0;
        }
        break;
      }
      case Phase::kClose:
        glove_target = ContactPosition(disc) + grasp_margin;
        if (s.button && s.discs[disc].location == plant::DiscLocation::kGrasped) {
          if (++settled_ticks >= kSettleTicks) Enter(Phase::kLift);
        } else if (phase_ticks % kGraspRetryTicks == 0 && grasp_margin + kGraspStep <= kGraspMarginMax + 1e-9) {
          grasp_margin += kGraspStep;
        }
        break;
      case Phase::kRelease:
        glove_target = ContactPosition(disc) - kReleaseMargin;
        if (!s.button && s.discs[disc].location != plant::DiscLocation::kGrasped) {
          if (++settled_ticks >= kSettleTicks) {
            ++move_index;
            Enter(move_index < moves.size() ? Phase::kOpen : Phase::kDone);
          }
        }
        break;
      case Phase::kDone:
        break;
    }

    if (glove_target) {
      const int raw = GloveRaw(*glove_target);
      if (sent_glove != raw) {
        out.push_back(gateway::GloveInput{raw});
        sent_glove = raw;
      }
    }
    if (!moving) ctrl = {};
    ctrl.axes.joy_x = Round3(ctrl.axes.joy_x);
    ctrl.axes.joy_y = Round3(ctrl.axes.joy_y);
    ctrl.axes.finger_trigger = Round3(ctrl.axes.finger_trigger);
    if (!sent_controller || !(*sent_controller == ctrl)) {
      out.push_back(ctrl);
      sent_controller = ctrl;
    }
    return out;
  }
};

AutopilotOperator::AutopilotOperator(const Scenario& scenario) : impl_(std::make_unique<Impl>(scenario)) {}
AutopilotOperator::~AutopilotOperator() = default;

std::vector<gateway::InputMessage> AutopilotOperator::Poll(const gateway::StateSnapshot& last, std::uint64_t) {
  return impl_->Poll(last);
}

bool AutopilotOperator::Exhausted() const { return impl_->phase == Phase::kDone; }

}  // namespace subsense::harness
