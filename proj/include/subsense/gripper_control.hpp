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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace subsense::gripper {

using TimestampMs = std::int64_t;

inline constexpr int kAdcMax = 1023;
inline constexpr int kPwmNeutralUs = 1500;
inline constexpr int kPwmMinUs = 1100;
inline constexpr int kPwmMaxUs = 1900;
/// Widths within this distance of neutral are a dead zone and never emitted.
inline constexpr int kPwmDeadZoneUs = 30;

class CalibrationError : public std::invalid_argument {
 public:
  explicit CalibrationError(const std::string& what) : std::invalid_argument(what) {}
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Per-user glove endpoints in raw ADC counts. Either polarity is allowed.
class GloveCalibration {
 public:
  GloveCalibration(int raw_open, int raw_closed);

  int raw_open() const { return raw_open_; }
  int raw_closed() const { return raw_closed_; }

  bool operator==(const GloveCalibration&) const = default;

 private:
  int raw_open_;
  int raw_closed_;
};

/// Closure fraction, 0 = fully open, 1 = fully closed. Clamped on construction.
class NormalizedPosition {
 public:
  constexpr NormalizedPosition() = default;
  constexpr explicit NormalizedPosition(double v)
      : value_(v != v ? 0.0 : (v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v))) {}

  constexpr double value() const { return value_; }

  auto operator<=>(const NormalizedPosition&) const = default;

 private:
  double value_ = 0.0;
};

enum class PwmDirection { kNeutral, kOpen, kClose };

/// One servo pulse-width command. Construction rejects widths outside the
/// actuator range or inside the dead zone around neutral.
class PwmCommand {
 public:
  PwmCommand(std::uint8_t channel, int width_us);

  static PwmCommand Neutral(std::uint8_t channel) { return {channel, kPwmNeutralUs}; }

  std::uint8_t channel() const { return channel_; }
  int width_us() const { return width_us_; }
  PwmDirection direction() const;
  bool is_neutral() const { return width_us_ == kPwmNeutralUs; }

  bool operator==(const PwmCommand&) const = default;

 private:
  std::uint8_t channel_;
  int width_us_;
};

/// True iff `width_us` is a legal emitted width (neutral, open or close band).
bool IsValidPwmWidth(int width_us);

struct ControllerConfig {
  double n_tol = 0.05;
  double t1_ms = 45.0;
  double t2_min_ms = 10.0;
  double t2_max_ms = 300.0;
  int open_pwm_us = 1700;
  int close_pwm_us = 1300;
  std::uint8_t channel = 9;

  /// Throws ConfigError when an invariant is violated.
  void Validate() const;
};

enum class ControllerPhase { kIdle, kMovePulse, kCooldown };

struct GripperControllerState {
  ControllerPhase phase = ControllerPhase::kIdle;
  TimestampMs last_move_start = 0;
  TimestampMs neutral_deadline = 0;
  TimestampMs next_move_allowed = 0;
};

struct ControllerOutput {
  std::optional<PwmCommand> command;
  GripperControllerState state;
};

/// Linear map of a raw reading onto [0, 1] using the calibration endpoints.
NormalizedPosition Normalize(int raw, const GloveCalibration& calib);

/// Inverse of Normalize, rounded to the nearest ADC count.
int Denormalize(NormalizedPosition pos, const GloveCalibration& calib);

/// Calibration from recorded open/closed hand samples (median of each set).
GloveCalibration Calibrate(std::span<const int> samples_open, std::span<const int> samples_closed);

/// Delay between successive move commands for an error magnitude. Returns
/// t2_max_ms inside the deadband and falls affinely to t2_min_ms at |e| = 1.
double T2ForError(double e_abs, const ControllerConfig& cfg);

/// One step of the bang-bang position loop. Emits at most one command.
ControllerOutput ControllerStep(NormalizedPosition glove, NormalizedPosition gripper, TimestampMs now,
                                const GripperControllerState& state, const ControllerConfig& cfg);

/// Owning wrapper around ControllerStep for callers that keep one loop.
class GripperController {
 public:
  explicit GripperController(ControllerConfig cfg = {});

  std::optional<PwmCommand> Step(NormalizedPosition glove, NormalizedPosition gripper, TimestampMs now);
  void Reset() { state_ = {}; }

  const GripperControllerState& state() const { return state_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  GripperControllerState state_;
};

const char* ToString(ControllerPhase phase);

}  // namespace subsense::gripper
