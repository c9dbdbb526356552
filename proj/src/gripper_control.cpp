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

#include "subsense/gripper_control.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace subsense::gripper {

GloveCalibration::GloveCalibration(int raw_open, int raw_closed) : raw_open_(raw_open), raw_closed_(raw_closed) {
  if (raw_open < 0 || raw_open > kAdcMax || raw_closed < 0 || raw_closed > kAdcMax) {
    throw CalibrationError("calibration endpoints must lie in [0, 1023]");
  }
  if (raw_open == raw_closed) {
    throw CalibrationError("degenerate calibration: open and closed endpoints are equal");
  }
}

bool IsValidPwmWidth(int width_us) {
  if (width_us == kPwmNeutralUs) return true;
  if (width_us < kPwmMinUs || width_us > kPwmMaxUs) return false;
  return std::abs(width_us - kPwmNeutralUs) >= kPwmDeadZoneUs;
}

PwmCommand::PwmCommand(std::uint8_t channel, int width_us) : channel_(channel), width_us_(width_us) {
  if (!IsValidPwmWidth(width_us)) {
    throw std::out_of_range("pwm width " + std::to_string(width_us) + " us is not an emittable command");
  }
}

PwmDirection PwmCommand::direction() const {
  if (width_us_ == kPwmNeutralUs) return PwmDirection::kNeutral;
  return width_us_ > kPwmNeutralUs ? PwmDirection::kOpen : PwmDirection::kClose;
}

void ControllerConfig::Validate() const {
  if (!(n_tol > 0.0 && n_tol < 1.0)) throw ConfigError("n_tol must lie in (0, 1)");
  if (!(t1_ms > 0.0)) throw ConfigError("t1_ms must be positive");
  if (!(t2_min_ms < t2_max_ms)) throw ConfigError("t2_min_ms must be below t2_max_ms");
  if (t2_min_ms < 0.0) throw ConfigError("t2_min_ms must be non-negative");
  if (open_pwm_us < kPwmNeutralUs + kPwmDeadZoneUs || open_pwm_us > kPwmMaxUs) {
    throw ConfigError("open_pwm_us must lie in [1530, 1900]");
  }
  if (close_pwm_us < kPwmMinUs || close_pwm_us > kPwmNeutralUs - kPwmDeadZoneUs) {
    throw ConfigError("close_pwm_us must lie in [1100, 1470]");
  }
}

NormalizedPosition Normalize(int raw, const GloveCalibration& calib) {
  const double span = static_cast<double>(calib.raw_closed() - calib.raw_open());
  return NormalizedPosition((raw - calib.raw_open()) / span);
}

int Denormalize(NormalizedPosition pos, const GloveCalibration& calib) {
  const double span = static_cast<double>(calib.raw_closed() - calib.raw_open());
  return static_cast<int>(std::lround(calib.raw_open() + pos.value() * span));
}

namespace {

int Median(std::span<const int> samples) {
  std::vector<int> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  // Even count: lower-rounded mean of the two middle samples.
  return static_cast<int>(std::floor((sorted[mid - 1] + sorted[mid]) / 2.0));
}

}  // namespace

GloveCalibration Calibrate(std::span<const int> samples_open, std::span<const int> samples_closed) {
  if (samples_open.empty() || samples_closed.empty()) {
    throw CalibrationError("calibration needs at least one open and one closed sample");
  }
  return GloveCalibration(Median(samples_open), Median(samples_closed));
}

double T2ForError(double e_abs, const ControllerConfig& cfg) {
  e_abs = std::clamp(std::isnan(e_abs) ? 0.0 : e_abs, 0.0, 1.0);
  if (e_abs <= cfg.n_tol) return cfg.t2_max_ms;
  const double frac = (e_abs - cfg.n_tol) / (1.0 - cfg.n_tol);
  const double t2 = cfg.t2_max_ms - (cfg.t2_max_ms - cfg.t2_min_ms) * frac;
  return std::clamp(t2, cfg.t2_min_ms, cfg.t2_max_ms);
}

ControllerOutput ControllerStep(NormalizedPosition glove, NormalizedPosition gripper, TimestampMs now,
                                const GripperControllerState& state, const ControllerConfig& cfg) {
  ControllerOutput out{std::nullopt, state};
  GripperControllerState& next = out.state;

  if (state.phase == ControllerPhase::kMovePulse) {
    if (now >= state.neutral_deadline) {
      out.command = PwmCommand::Neutral(cfg.channel);
      next.phase = ControllerPhase::kCooldown;
    }
    return out;
  }

  const double e = glove.value() - gripper.value();
  const double e_abs = std::abs(e);

  if (now < state.next_move_allowed) return out;
  if (e_abs <= cfg.n_tol) {
    next.phase = ControllerPhase::kIdle;
    return out;
  }

  out.command = PwmCommand(cfg.channel, e > 0.0 ? cfg.close_pwm_us : cfg.open_pwm_us);
  next.phase = ControllerPhase::kMovePulse;
  next.last_move_start = now;
  next.neutral_deadline = now + static_cast<TimestampMs>(std::ceil(cfg.t1_ms));
  next.next_move_allowed = now + static_cast<TimestampMs>(std::ceil(T2ForError(e_abs, cfg)));
  return out;
}

GripperController::GripperController(ControllerConfig cfg) : cfg_(cfg) { cfg_.Validate(); }

std::optional<PwmCommand> GripperController::Step(NormalizedPosition glove, NormalizedPosition gripper,
                                                  TimestampMs now) {
  auto out = ControllerStep(glove, gripper, now, state_, cfg_);
  state_ = out.state;
  return out.command;
}

const char* ToString(ControllerPhase phase) {
  switch (phase) {
    case ControllerPhase::kIdle:
      return "idle";
    case ControllerPhase::kMovePulse:
      return "move";
    case ControllerPhase::kCooldown:
      return "cooldown";
  }
  return "?";
}

}  // namespace subsense::gripper
