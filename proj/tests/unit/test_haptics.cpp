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

#include <doctest.h>

#include <random>
#include <vector>

#include "subsense/haptics.hpp"

using namespace subsense::haptics;

namespace {

// Vibration at each tick for a button trace sampled every `dt` ms.
std::vector<bool> Run(const std::vector<bool>& buttons, std::int64_t dt, HapticDriver d = {}) {
  std::vector<bool> out;
  for (std::size_t i = 0; i < buttons.size(); ++i) out.push_back(d.Update(buttons[i], static_cast<std::int64_t>(i) * dt));
  return out;
}

}  // namespace

TEST_CASE("press and hold vibrates for two seconds") {
  std::vector<bool> b(251, true);  // 0..5000 ms at 20 ms
  const auto v = Run(b, 20);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto t = static_cast<std::int64_t>(i) * 20;
    CHECK(v[i] == (t < 2000));
  }
}

TEST_CASE("release ends vibration early") {
  std::vector<bool> b(100, false);
  for (int i = 0; i < 25; ++i) b[i] = true;  // held during [0, 500)
  const auto v = Run(b, 20);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == (i < 25));
}

TEST_CASE("never pressed never vibrates") {
  const auto v = Run(std::vector<bool>(500, false), 20);
  for (bool x : v) CHECK_FALSE(x);
}

TEST_CASE("holding past the window does not retrigger but a re-press does") {
  HapticDriver d;
  CHECK(d.Update(true, 0));
  CHECK_FALSE(d.Update(true, 2000));
  CHECK_FALSE(d.Update(true, 4000));
  CHECK_FALSE(d.Update(false, 4020));
  CHECK(d.Update(true, 4040));
  CHECK(d.state().vibration_started == 4040);
}

TEST_CASE("a button held at start is not an edge") {
  HapticDriver d;
  d.Reset(true);
  CHECK_FALSE(d.Update(true, 0));
  CHECK_FALSE(d.Update(false, 20));
  CHECK(d.Update(true, 40));
}

TEST_CASE("pure update function matches the driver") {
  HapticState s;
  auto out = HapticUpdate(true, 0, s);
  CHECK(out.vibrate);
  CHECK(out.state.vibrating);
  CHECK(out.state.button_prev);
  out = HapticUpdate(true, 1999, out.state);
  CHECK(out.vibrate);
  out = HapticUpdate(true, 2000, out.state);
  CHECK_FALSE(out.vibrate);
}

TEST_CASE("random traces: interval = min(2000, hold) and one start per rising edge") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<bool> b;
    bool level = false;
    std::uniform_int_distribution<int> run_len(1, 180);
    while (b.size() < 3000) {
      const int n = run_len(rng);
      for (int i = 0; i < n; ++i) b.push_back(level);
      level = !level;
    }
    const auto v = Run(b, 20);
    int rising = 0, starts = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const bool prev_b = i > 0 && b[i - 1];
      const bool prev_v = i > 0 && v[i - 1];
      if (b[i] && !prev_b) {
        ++rising;
        // Measure the hold and the vibration that began here.
        std::size_t hold = 0, vib = 0;
        while (i + hold < b.size() && b[i + hold]) ++hold;
        while (i + vib < v.size() && v[i + vib]) ++vib;
        const double expect = std::min(2000.0, hold * 20.0);
        CHECK(std::abs(vib * 20.0 - expect) <= 20.0);
      }
      if (v[i] && !prev_v) ++starts;
    }
    CHECK(starts == rising);
  }
}
