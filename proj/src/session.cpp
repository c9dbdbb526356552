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

#include "subsense/session.hpp"

#include <algorithm>
#include <cmath>

namespace subsense::gateway {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

int CameraTiltToPwm(double tilt_deg) {
  const double clamped = std::clamp(tilt_deg, -input::kCameraTiltLimitDeg, input::kCameraTiltLimitDeg);
  return static_cast<int>(std::lround(gripper::kPwmNeutralUs + clamped / input::kCameraTiltLimitDeg * 400.0));
}

double CameraPwmToTilt(int width_us) {
  return (width_us - gripper::kPwmNeutralUs) / 400.0 * input::kCameraTiltLimitDeg;
}

bool StateSnapshot::SameStateAs(const StateSnapshot& o) const {
  return session_start_tick == o.session_start_tick && tick_ms == o.tick_ms && vehicle == o.vehicle && jaw == o.jaw &&
         gripper_position == o.gripper_position && glove_position == o.glove_position && button == o.button &&
         vibrating == o.vibrating && camera_tilt_deg == o.camera_tilt_deg && setpoint == o.setpoint &&
         shifted == o.shifted && gripper_pwm_us == o.gripper_pwm_us && discs == o.discs && metrics == o.metrics &&
         pipeline_latency_ticks == o.pipeline_latency_ticks && pipeline_latency_ms == o.pipeline_latency_ms &&
         events == o.events;
}

Session::Session(Scenario scenario, wire::ClockMs clock)
    : scenario_(std::move(scenario)),
      world_(std::in_place, scenario_.plant),
      controller_(scenario_.controller),
      tracker_(world_->workspace()),
      uplink_(clock),
      downlink_(clock) {
  scenario_.Validate();
  ResetPlant();
  Publish(std::nullopt, {});
}

std::int64_t Session::now_ms() const {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(tick_) * scenario_.tick_ms()));
}

void Session::ResetPlant() {
  world_.emplace(scenario_.plant);
  controller_.Reset();
  haptics_.Reset(world_->button());
  tracker_.Reset(world_->workspace());
  gripper_measured_ = gripper::Normalize(
                          gripper::Denormalize(gripper::NormalizedPosition(world_->gripper().reported_position()),
                                               scenario_.gripper_pot),
                          scenario_.gripper_pot)
                          .value();
  button_measured_ = world_->button();
  vehicle_setpoint_ = {};
  last_camera_sent_.reset();
  session_start_tick_ = tick_;
}

harness::TaskMetrics Session::Metrics() const {
  harness::TaskMetrics m = tracker_.metrics();
  m.elapsed_s = snapshot_.elapsed_s();
  return m;
}

LinkStats Session::link_stats() const {
  return {uplink_.stats(), downlink_.stats(), sensor_decode_errors_, command_decode_errors_,
          sensor_seq_.total_missing()};
}

void Session::ApplyInput(const InputMessage& msg, std::vector<plant::PlantEvent>& admin_events) {
  std::visit(Overloaded{
                 [this](const GloveInput& g) { glove_raw_ = std::clamp(g.raw, 0, gripper::kAdcMax); },
                 [this](const ControllerMessage& c) { controller_in_ = c.axes.Clamped(); },
                 [this](const HmdMessage& h) { hmd_ = h.pose.Normalized(); },
                 [this, &admin_events](const AdminMessage& a) {
                   if (a.action == AdminAction::kReset) {
                     ResetPlant();
                     admin_events.clear();
                   } else {
                     auto restored = world_->AcknowledgeIntervention();
                     admin_events.insert(admin_events.end(), restored.begin(), restored.end());
                   }
                 },
             },
             msg);
}

const StateSnapshot& Session::Tick(std::span<const InputMessage> inputs) {
  const std::int64_t now = now_ms();
  const double dt = scenario_.tick_ms();

  // 1. inputs
  std::vector<plant::PlantEvent> events;
  for (const auto& msg : inputs) ApplyInput(msg, events);
  if (!inputs.empty()) last_input_tick_ = tick_;

  // 2. input mapping
  const auto ctrl_sp = input::MapController(controller_in_, scenario_.shift_threshold);
  const auto hmd_sp = input::MapHmd(hmd_, scenario_.theta_max_deg);
  const input::VehicleSetpoint setpoint = input::MergeSetpoints(ctrl_sp, hmd_sp);

  // 3. gripper control
  const gripper::NormalizedPosition glove =
      glove_raw_ ? gripper::Normalize(*glove_raw_, scenario_.glove) : gripper::NormalizedPosition(0.0);
  const auto cmd = controller_.Step(glove, gripper::NormalizedPosition(gripper_measured_), now);

  // 4. host -> vehicle over the command link
  std::vector<wire::Bytes> outbound;
  wire::ManualSetpoint manual;
  manual.axes = {wire::ToMilli(setpoint.surge), wire::ToMilli(setpoint.sway),  wire::ToMilli(setpoint.heave),
                 wire::ToMilli(setpoint.roll),  wire::ToMilli(setpoint.pitch), wire::ToMilli(setpoint.yaw)};
  outbound.push_back(wire::EncodeCommand(wire::MakeManualSetpoint(command_seq_++, manual)));
  if (cmd) {
    outbound.push_back(wire::EncodeCommand(wire::MakeSetServo(
        command_seq_++, {cmd->channel(), static_cast<std::uint16_t>(cmd->width_us())})));
  }
  if (!last_camera_sent_ || *last_camera_sent_ != setpoint.camera_tilt_deg) {
    outbound.push_back(wire::EncodeCommand(wire::MakeSetServo(
        command_seq_++,
        {scenario_.camera_channel, static_cast<std::uint16_t>(CameraTiltToPwm(setpoint.camera_tilt_deg))})));
    last_camera_sent_ = setpoint.camera_tilt_deg;
  }

  std::optional<gripper::PwmCommand> vehicle_gripper_cmd;
  for (const auto& frame : outbound) {
    auto forwarded = downlink_.Forward(frame, downlink_.Now());
    if (!forwarded) continue;
    auto decoded = wire::DecodeCommand(*forwarded);
    if (!decoded) {
      ++command_decode_errors_;
      continue;
    }
    if (auto m = wire::ParseManualSetpoint(*decoded.value)) {
      const auto& a = m.value->axes;
      vehicle_setpoint_.surge = wire::FromMilli(a[0]);
      vehicle_setpoint_.sway = wire::FromMilli(a[1]);
      vehicle_setpoint_.heave = wire::FromMilli(a[2]);
      vehicle_setpoint_.roll = wire::FromMilli(a[3]);
      vehicle_setpoint_.pitch = wire::FromMilli(a[4]);
      vehicle_setpoint_.yaw = wire::FromMilli(a[5]);
    } else if (auto s = wire::ParseSetServo(*decoded.value)) {
      if (s.value->channel == scenario_.camera_channel) {
        world_->SetCameraTilt(CameraPwmToTilt(s.value->width_us));
      } else if (s.value->channel == scenario_.controller.channel && gripper::IsValidPwmWidth(s.value->width_us)) {
        vehicle_gripper_cmd = gripper::PwmCommand(s.value->channel, s.value->width_us);
      } else {
        ++command_decode_errors_;
      }
    } else {
      ++command_decode_errors_;
    }
  }

  // 5. plant
  auto step = world_->Tick(vehicle_gripper_cmd, vehicle_setpoint_, dt);
  events.insert(events.end(), step.events.begin(), step.events.end());

  // 6. vehicle -> host sensor frame
  const int pot = gripper::Denormalize(gripper::NormalizedPosition(world_->gripper().reported_position()),
                                       scenario_.gripper_pot);
  wire::SensorFrame sf{sensor_seq_out_++, static_cast<std::uint16_t>(std::clamp(pot, 0, gripper::kAdcMax)),
                       step.button};
  wire::Bytes sensor_bytes = wire::EncodeSensorFrame(sf);
  if (corrupt_next_sensor_) {
    sensor_bytes[2] ^= 0x01;
    corrupt_next_sensor_ = false;
  }
  if (auto forwarded = uplink_.Forward(sensor_bytes, uplink_.Now())) {
    if (auto decoded = wire::DecodeSensorFrame(*forwarded)) {
      sensor_seq_.Observe(decoded.value->seq);
      gripper_measured_ = gripper::Normalize(decoded.value->pot_raw, scenario_.gripper_pot).value();
      button_measured_ = decoded.value->button;
    } else {
      ++sensor_decode_errors_;
    }
  } else {
    ++sensor_decode_errors_;
  }

  // 7. haptics, 8. publish
  tracker_.Observe(events, world_->workspace());
  snapshot_.setpoint = setpoint;
  snapshot_.shifted = ctrl_sp.shifted;
  snapshot_.glove_position = glove.value();
  const bool vibrate = haptics_.Update(button_measured_, now);
  snapshot_.vibrating = vibrate;
  ++tick_;
  Publish(cmd, std::move(events));
  return snapshot_;
}

void Session::Publish(const std::optional<gripper::PwmCommand>& cmd, std::vector<plant::PlantEvent> events) {
  StateSnapshot& s = snapshot_;
  s.tick = tick_;
  s.session_start_tick = session_start_tick_;
  s.tick_ms = scenario_.tick_ms();
  s.vehicle = world_->vehicle().pose();
  s.jaw = world_->vehicle().JawPosition();
  s.gripper_position = gripper_measured_;
  s.button = button_measured_;
  s.camera_tilt_deg = world_->camera_tilt_deg();
  s.gripper_pwm_us = cmd ? std::optional<int>(cmd->width_us()) : std::nullopt;
  for (int d = 0; d < 3; ++d) {
    const auto& disc = world_->workspace().discs()[d];
    s.discs[d] = {disc.location, disc.pole, disc.level, disc.center};
  }
  const auto& m = tracker_.metrics();
  s.metrics = {m.subtasks_completed, m.minor, m.major, m.collisions, m.interventions, m.completed};
  // Inputs are applied in the tick that drains them, so their effect first
  // shows in that tick's snapshot.
  if (last_input_tick_ && *last_input_tick_ + 1 == tick_) {
    s.pipeline_latency_ticks = static_cast<int>(tick_ - *last_input_tick_);
    s.pipeline_latency_ms = s.pipeline_latency_ticks * scenario_.tick_ms();
  }
  s.events = std::move(events);
}

}  // namespace subsense::gateway
