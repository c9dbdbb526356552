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

namespace subsense::haptics {

inline constexpr std::int64_t kVibrationWindowMs = 2000;

struct HapticState {
  bool vibrating = false;
  std::int64_t vibration_started = 0;
  bool button_prev = false;

  /// State for a session whose button is already `held` at start: a held
  /// button produces no vibration until it is released and pressed again.
  static HapticState StartingWith(bool held) { return {false, 0, held}; }
};

struct HapticOutput {
  bool vibrate = false;
  HapticState state;
};

/// Vibrate from a grasp-button rising edge until release or 2 s, whichever
/// comes first. Holding past the window does not re-trigger.
HapticOutput HapticUpdate(bool button, std::int64_t now_ms, const HapticState& state);

class HapticDriver {
 public:
  bool Update(bool button, std::int64_t now_ms) {
    auto out = HapticUpdate(button, now_ms, state_);
    state_ = out.state;
    return out.vibrate;
  }
  void Reset(bool held = false) { state_ = HapticState::StartingWith(held); }
  const HapticState& state() const { return state_; }

 private:
  HapticState state_;
};

}  // namespace subsense::haptics
