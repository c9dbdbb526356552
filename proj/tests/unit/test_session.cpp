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

#include <cmath>

#include "subsense/session.hpp"

using namespace subsense;
using namespace subsense::gateway;

namespace {

Scenario Quiet() {
  Scenario s;
  s.plant.gripper.noise_sigma = 0.0;
  return s;
}

std::int64_t FakeClock() { return 0; }

}  // namespace

TEST_CASE("noise-free idle session holds its state") {
  Session s(Quiet(), FakeClock);
  s.Tick();
  const StateSnapshot first = s.snapshot();
  for (int i = 0; i < 100; ++i) {
    s.Tick();
    CHECK(s.snapshot().SameStateAs(first));
  }
  CHECK(s.snapshot().tick == first.tick + 100);
  CHECK_FALSE(s.snapshot().gripper_pwm_us);
  CHECK(s.Metrics().subtasks_completed == 0);
}

TEST_CASE("glove step closes the gripper monotonically") {
  const Scenario sc = Quiet();
  Session s(sc, FakeClock);
  const std::vector<InputMessage> close{GloveInput{sc.glove.raw_closed()}};
  s.Tick(close);
  double prev = s.snapshot().gripper_position;
  bool any_pwm = false;
  for (int i = 0; i < 250; ++i) {
    s.Tick();
    const double g = s.snapshot().gripper_position;
    CHECK(g >= prev - 1e-12);
    prev = g;
    if (s.snapshot().gripper_pwm_us) any_pwm = true;
  }
  CHECK(any_pwm);
  CHECK(prev == doctest::Approx(1.0).epsilon(0.06));
  CHECK(s.snapshot().glove_position == 1.0);
}

TEST_CASE("input effects appear in the snapshot of the tick that drains them") {
  Session s(Quiet(), FakeClock);
  const std::vector<InputMessage> fwd{ControllerMessage{{0.0, 0.0, 1.0, 0.0}}};
  s.Tick(fwd);
  CHECK(s.snapshot().setpoint.surge > 0.0);
  CHECK(s.snapshot().pipeline_latency_ticks >= 1);
  CHECK(s.snapshot().pipeline_latency_ms == doctest::Approx(s.snapshot().pipeline_latency_ticks * 20.0));
}

TEST_CASE("hmd pitch drives the camera over the command link") {
  Session s(Quiet(), FakeClock);
  const std::vector<InputMessage> look{HmdMessage{{0.0, -30.0, 0.0}}};
  s.Tick(look);
  CHECK(s.snapshot().camera_tilt_deg == doctest::Approx(s.snapshot().setpoint.camera_tilt_deg).epsilon(0.02));
  CHECK(s.snapshot().camera_tilt_deg != 0.0);
}

TEST_CASE("camera pwm mapping is centred and invertible") {
  CHECK(CameraTiltToPwm(0.0) == 1500);
  for (double t : {-30.0, -10.0, 5.0, 20.0}) CHECK(CameraPwmToTilt(CameraTiltToPwm(t)) == doctest::Approx(t).epsilon(0.02));
}

TEST_CASE("admin reset restores the plant while the tick counter continues") {
  Session s(Quiet(), FakeClock);
  s.Tick();
  const StateSnapshot start = s.snapshot();
  const std::vector<InputMessage> go{ControllerMessage{{0.0, 0.0, 1.0, 0.0}}};
  s.Tick(go);
  for (int i = 0; i < 50; ++i) s.Tick();
  CHECK(s.snapshot().vehicle.position.x != doctest::Approx(start.vehicle.position.x));

  const std::vector<InputMessage> reset{AdminMessage{AdminAction::kReset}, ControllerMessage{}};
  s.Tick(reset);
  const auto& after = s.snapshot();
  CHECK(after.tick == start.tick + 52);
  CHECK(after.session_start_tick == start.tick + 51);
  CHECK(after.elapsed_s() == doctest::Approx(0.02));
  CHECK(after.vehicle.position.x == doctest::Approx(start.vehicle.position.x).epsilon(1e-3));
  CHECK(after.metrics == MetricCounters{});
}

TEST_CASE("a corrupted sensor frame is counted and dropped") {
  Session s(Quiet(), FakeClock);
  for (int i = 0; i < 5; ++i) s.Tick();
  CHECK(s.link_stats().sensor_decode_errors == 0);
  const double before = s.snapshot().gripper_position;
  s.CorruptNextSensorFrame();
  s.Tick();
  CHECK(s.link_stats().sensor_decode_errors == 1);
  CHECK(s.snapshot().gripper_position == before);
  s.Tick();
  s.Tick();
  CHECK(s.link_stats().sensor_decode_errors == 1);
  CHECK(s.link_stats().sensor_seq_missing == 1);
  CHECK(s.link_stats().command_decode_errors == 0);
}

TEST_CASE("identical sessions produce identical snapshots") {
  Scenario sc;  // noisy on purpose
  Session a(sc, FakeClock), b(sc, FakeClock);
  const std::vector<InputMessage> in{GloveInput{650}, ControllerMessage{{0.3, 0.4, 0.0, 0.0}}};
  a.Tick(in);
  b.Tick(in);
  for (int i = 0; i < 200; ++i) {
    a.Tick();
    b.Tick();
    REQUIRE(a.snapshot().SameStateAs(b.snapshot()));
  }
}
