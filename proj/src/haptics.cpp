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

#include "subsense/haptics.hpp"

namespace subsense::haptics {

HapticOutput HapticUpdate(bool button, std::int64_t now_ms, const HapticState& state) {
  HapticOutput out{false, state};
  HapticState& next = out.state;

  if (button && !state.button_prev) {
    next.vibrating = true;
    next.vibration_started = now_ms;
  } else if (!button) {
    next.vibrating = false;
  }
  if (next.vibrating && now_ms - next.vibration_started >= kVibrationWindowMs) {
    next.vibrating = false;
  }
  next.button_prev = button;
  out.vibrate = next.vibrating;
  return out;
}

}  // namespace subsense::haptics
