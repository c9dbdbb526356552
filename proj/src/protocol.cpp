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

#include "subsense/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace subsense::gateway {

using nlohmann::json;

namespace {

double Number(const json& j, const char* key, double fallback = 0.0) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw std::invalid_argument(std::string("field '") + key + "' must be finite");
  return d;
}

json Vec(const plant::Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

const char* ToString(plant::DiscLocation loc) {
  switch (loc) {
    case plant::DiscLocation::kOnPole:
      return "on_pole";
    case plant::DiscLocation::kGrasped:
      return "grasped";
    case plant::DiscLocation::kLoose:
      return "loose";
  }
  return "?";
}

json InputToJson(const InputMessage& msg) {
  if (auto g = std::get_if<GloveInput>(&msg)) return {{"type", "glove"}, {"raw", g->raw}};
  if (auto c = std::get_if<ControllerMessage>(&msg)) {
    return {{"type", "controller"},
            {"joy_x", c->axes.joy_x},
            {"joy_y", c->axes.joy_y},
            {"finger_trigger", c->axes.finger_trigger},
            {"grip_trigger", c->axes.grip_trigger}};
  }
  if (auto h = std::get_if<HmdMessage>(&msg)) {
    return {{"type", "hmd"}, {"roll_deg", h->pose.roll_deg}, {"pitch_deg", h->pose.pitch_deg}, {"yaw_deg", h->pose.yaw_deg}};
  }
  const auto& a = std::get<AdminMessage>(msg);
  return {{"type", "admin"}, {"action", a.action == AdminAction::kReset ? "reset" : "intervention_ack"}};
}

InputMessage InputFromJson(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) throw std::invalid_argument("message needs a string 'type'");
  const std::string type = j["type"];
  if (type == "glove") {
    if (!j.contains("raw") || !j["raw"].is_number_integer()) throw std::invalid_argument("glove needs integer 'raw'");
    const int raw = j["raw"].get<int>();
    if (raw < 0 || raw > gripper::kAdcMax) throw std::invalid_argument("glove 'raw' outside [0, 1023]");
    return GloveInput{raw};
  }
  if (type == "controller") {
    ControllerMessage c;
    c.axes.joy_x = Number(j, "joy_x");
    c.axes.joy_y = Number(j, "joy_y");
    c.axes.finger_trigger = Number(j, "finger_trigger");
    c.axes.grip_trigger = Number(j, "grip_trigger");
    return c;
  }
  if (type == "hmd") {
    HmdMessage h;
    h.pose.roll_deg = Number(j, "roll_deg");
    h.pose.pitch_deg = Number(j, "pitch_deg");
    h.pose.yaw_deg = Number(j, "yaw_deg");
    return h;
  }
  if (type == "admin") {
    if (!j.contains("action") || !j["action"].is_string()) throw std::invalid_argument("admin needs string 'action'");
    const std::string action = j["action"];
    if (action == "reset") return AdminMessage{AdminAction::kReset};
    if (action == "intervention_ack") return AdminMessage{AdminAction::kInterventionAck};
    throw std::invalid_argument("unknown admin action '" + action + "'");
  }
  throw std::invalid_argument("unknown message type '" + type + "'");
}

std::variant<ClientMessage, ParseError> ParseClientMessage(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    return ParseError{"malformed JSON"};
  }
  try {
    if (j.is_object() && j.value("type", "") == "subscribe") {
      const double rate = Number(j, "rate_hz");
      if (rate < 0.0) return ParseError{"rate_hz must be non-negative"};
      return ClientMessage{SubscribeRequest{rate}};
    }
    return ClientMessage{InputFromJson(j)};
  } catch (const std::exception& e) {
    return ParseError{e.what()};
  }
}

json EventToJson(const plant::PlantEvent& e) {
  json j{{"t_ms", e.time_ms}, {"kind", plant::ToString(e.kind)}, {"detail", e.detail}};
  if (e.disc >= 0) j["disc"] = e.disc;
  if (e.pole >= 0) j["pole"] = e.pole;
  return j;
}

json SnapshotToJson(const StateSnapshot& s) {
  json discs = json::array();
  for (const auto& d : s.discs) {
    discs.push_back({{"location", ToString(d.location)}, {"pole", d.pole}, {"level", d.level}, {"center_m", Vec(d.center)}});
  }
  json events = json::array();
  for (const auto& e : s.events) events.push_back(EventToJson(e));
  const auto& sp = s.setpoint;
  return {
      {"type", "snapshot"},
      {"tick", s.tick},
      {"tick_ms", s.tick_ms},
      {"elapsed_s", s.elapsed_s()},
      {"vehicle",
       {{"position_m", Vec(s.vehicle.position)},
        {"roll_deg", s.vehicle.roll},
        {"pitch_deg", s.vehicle.pitch},
        {"yaw_deg", s.vehicle.yaw}}},
      {"jaw_m", Vec(s.jaw)},
      {"gripper_position", s.gripper_position},
      {"glove_position", s.glove_position},
      {"button", s.button},
      {"vibrating", s.vibrating},
      {"camera_tilt_deg", s.camera_tilt_deg},
      {"setpoint",
       {{"surge", sp.surge},
        {"sway", sp.sway},
        {"heave", sp.heave},
        {"roll", sp.roll},
        {"pitch", sp.pitch},
        {"yaw", sp.yaw},
        {"camera_tilt_deg", sp.camera_tilt_deg}}},
      {"shifted", s.shifted},
      {"gripper_pwm_us", s.gripper_pwm_us ? json(*s.gripper_pwm_us) : json(nullptr)},
      {"discs", discs},
      {"metrics",
       {{"subtasks_completed", s.metrics.subtasks_completed},
        {"minor", s.metrics.minor},
        {"major", s.metrics.major},
        {"collisions", s.metrics.collisions},
        {"interventions", s.metrics.interventions},
        {"completed", s.metrics.completed}}},
      {"pipeline_latency_ticks", s.pipeline_latency_ticks},
      {"pipeline_latency_ms", s.pipeline_latency_ms},
      {"events", events},
  };
}

json MetricsToJson(const harness::TaskMetrics& m) {
  return {{"subtasks_completed", m.subtasks_completed},
          {"elapsed_s", m.elapsed_s},
          {"minor", m.minor},
          {"major", m.major},
          {"collisions", m.collisions},
          {"interventions", m.interventions},
          {"completed", m.completed}};
}

harness::TaskMetrics MetricsFromJson(const json& j) {
  harness::TaskMetrics m;
  m.subtasks_completed = j.at("subtasks_completed").get<int>();
  m.elapsed_s = j.at("elapsed_s").get<double>();
  m.minor = j.at("minor").get<int>();
  m.major = j.at("major").get<int>();
  m.collisions = j.at("collisions").get<int>();
  m.interventions = j.at("interventions").get<int>();
  m.completed = j.at("completed").get<bool>();
  return m;
}

json ErrorJson(const std::string& message) { return {{"type", "error"}, {"message", message}}; }

}  // namespace subsense::gateway
