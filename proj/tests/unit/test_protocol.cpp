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

#include "subsense/protocol.hpp"

using namespace subsense;
using namespace subsense::gateway;
using nlohmann::json;

namespace {

std::string ErrorOf(const std::string& line) {
  const auto r = ParseClientMessage(line);
  REQUIRE(std::holds_alternative<ParseError>(r));
  return std::get<ParseError>(r).message;
}

InputMessage InputOf(const std::string& line) {
  const auto r = ParseClientMessage(line);
  REQUIRE(std::holds_alternative<ClientMessage>(r));
  const auto& m = std::get<ClientMessage>(r);
  REQUIRE(std::holds_alternative<InputMessage>(m));
  return std::get<InputMessage>(m);
}

}  // namespace

TEST_CASE("each input type parses") {
  CHECK(InputOf(R"({"type":"glove","raw":512})") == InputMessage{GloveInput{512}});

  const auto c = InputOf(R"({"type":"controller","joy_x":0.5,"joy_y":-1,"finger_trigger":1,"grip_trigger":0})");
  const auto& cm = std::get<ControllerMessage>(c);
  CHECK(cm.axes.joy_x == 0.5);
  CHECK(cm.axes.joy_y == -1.0);
  CHECK(cm.axes.finger_trigger == 1.0);

  const auto h = std::get<HmdMessage>(InputOf(R"({"type":"hmd","roll_deg":10,"pitch_deg":-5,"yaw_deg":3})"));
  CHECK(h.pose.roll_deg == 10.0);
  CHECK(h.pose.pitch_deg == -5.0);

  CHECK(InputOf(R"({"type":"admin","action":"reset"})") == InputMessage{AdminMessage{AdminAction::kReset}});
  CHECK(InputOf(R"({"type":"admin","action":"intervention_ack"})") ==
        InputMessage{AdminMessage{AdminAction::kInterventionAck}});
}

TEST_CASE("missing controller axes default to zero") {
  const auto c = std::get<ControllerMessage>(InputOf(R"({"type":"controller","joy_y":0.25})"));
  CHECK(c.axes.joy_x == 0.0);
  CHECK(c.axes.joy_y == 0.25);
}

TEST_CASE("subscribe parses with and without a rate") {
  auto r = ParseClientMessage(R"({"type":"subscribe","rate_hz":10})");
  REQUIRE(std::holds_alternative<ClientMessage>(r));
  CHECK(std::get<SubscribeRequest>(std::get<ClientMessage>(r)).rate_hz == 10.0);
  r = ParseClientMessage(R"({"type":"subscribe"})");
  CHECK(std::get<SubscribeRequest>(std::get<ClientMessage>(r)).rate_hz == 0.0);
  CHECK(ErrorOf(R"({"type":"subscribe","rate_hz":-1})").find("rate_hz") != std::string::npos);
}

TEST_CASE("malformed messages give readable errors") {
  CHECK(ErrorOf("{not json") == "malformed JSON");
  CHECK_FALSE(ErrorOf("[1,2]").empty());
  CHECK(ErrorOf(R"({"raw":5})").find("type") != std::string::npos);
  CHECK(ErrorOf(R"({"type":"teleport"})").find("teleport") != std::string::npos);
  CHECK_FALSE(ErrorOf(R"({"type":"glove"})").empty());
  CHECK_FALSE(ErrorOf(R"({"type":"glove","raw":1.5})").empty());
  CHECK_FALSE(ErrorOf(R"({"type":"glove","raw":1024})").empty());
  CHECK_FALSE(ErrorOf(R"({"type":"glove","raw":-1})").empty());
  CHECK(ErrorOf(R"({"type":"controller","joy_x":"left"})").find("joy_x") != std::string::npos);
  CHECK_FALSE(ErrorOf(R"({"type":"admin","action":"explode"})").empty());
  CHECK_FALSE(ErrorOf(R"({"type":"admin"})").empty());
}

TEST_CASE("inputs round trip through json") {
  const std::vector<InputMessage> msgs{
      GloveInput{0}, GloveInput{1023},
      ControllerMessage{{0.25, -0.5, 1.0, 0.0}},
      HmdMessage{{12.5, -3.0, 7.0}},
      AdminMessage{AdminAction::kReset}, AdminMessage{AdminAction::kInterventionAck},
  };
  for (const auto& m : msgs) {
    CHECK(InputFromJson(InputToJson(m)) == m);
    CHECK(InputOf(InputToJson(m).dump()) == m);
  }
}

TEST_CASE("snapshot json carries the documented fields") {
  StateSnapshot s;
  s.tick = 150;
  s.session_start_tick = 100;
  s.tick_ms = 20.0;
  s.gripper_pwm_us = 1300;
  s.events.push_back({1000, plant::EventKind::kGrasp, "small", 0, 0});
  const json j = SnapshotToJson(s);
  CHECK(j["type"] == "snapshot");
  CHECK(j["tick"] == 150);
  CHECK(j["elapsed_s"].get<double>() == doctest::Approx(1.0));
  for (const char* key : {"vehicle", "jaw_m", "gripper_position", "glove_position", "button", "vibrating",
                          "camera_tilt_deg", "setpoint", "shifted", "discs", "metrics", "pipeline_latency_ticks",
                          "pipeline_latency_ms", "events"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["gripper_pwm_us"] == 1300);
  CHECK(j["discs"].size() == 3);
  CHECK(j["discs"][0]["location"] == "on_pole");
  CHECK(j["vehicle"]["position_m"].size() == 3);
  CHECK(j["events"][0]["kind"] == plant::ToString(plant::EventKind::kGrasp));
  CHECK(j["events"][0]["disc"] == 0);

  s.gripper_pwm_us.reset();
  CHECK(SnapshotToJson(s)["gripper_pwm_us"].is_null());
}

TEST_CASE("metrics and error json") {
  harness::TaskMetrics m;
  m.subtasks_completed = 7;
  m.elapsed_s = 12.5;
  m.minor = 1;
  m.completed = true;
  CHECK(MetricsFromJson(MetricsToJson(m)) == m);
  const json e = ErrorJson("bad");
  CHECK(e["type"] == "error");
  CHECK(e["message"] == "bad");
}
