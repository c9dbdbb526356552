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

#include "subsense/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace subsense {

using nlohmann::json;

namespace {

void RejectUnknown(const json& j, const std::string& section, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ScenarioError("'" + section + "' must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ScenarioError("unknown key '" + key + "' in " + section);
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void ReadVec(const json& j, const char* key, plant::Vec3& out) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number()) {
    throw ScenarioError(std::string("'") + key + "' must be [x, y, z]");
  }
  out = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

json VecJson(const plant::Vec3& v) { return json::array({v.x, v.y, v.z}); }

gripper::GloveCalibration ReadCalibration(const json& j, const std::string& name, gripper::GloveCalibration fallback) {
  RejectUnknown(j, name, {"raw_open", "raw_closed"});
  int open = fallback.raw_open();
  int closed = fallback.raw_closed();
  Read(j, "raw_open", open);
  Read(j, "raw_closed", closed);
  try {
    return {open, closed};
  } catch (const gripper::CalibrationError& e) {
    throw ScenarioError(name + ": " + e.what());
  }
}

}  // namespace

void Scenario::Validate() const {
  try {
    controller.Validate();
  } catch (const gripper::ConfigError& e) {
    throw ScenarioError(std::string("controller: ") + e.what());
  }
  if (!(tick_hz > 0.0 && tick_hz <= 1000.0)) throw ScenarioError("tick_hz must lie in (0, 1000]");
  if (!(session_limit_s > 0.0)) throw ScenarioError("session_limit_s must be positive");
  if (!(shift_threshold > 0.0 && shift_threshold <= 1.0)) throw ScenarioError("shift_threshold must lie in (0, 1]");
  if (!(theta_max_deg > 0.0)) throw ScenarioError("theta_max_deg must be positive");
  const auto& g = plant.gripper;
  if (!(g.rate_max > 0.0)) throw ScenarioError("gripper.rate_max must be positive");
  if (g.noise_sigma < 0.0) throw ScenarioError("gripper.noise_sigma must be non-negative");
  if (g.actuation_latency_ms < 0.0) throw ScenarioError("gripper.actuation_latency_ms must be non-negative");
  const auto& t = plant.tank;
  const auto& h = plant.vehicle.half_extent;
  if (t.length <= 2 * h.x || t.width <= 2 * h.y || t.depth <= 2 * h.z) {
    throw ScenarioError("tank is smaller than the vehicle");
  }
  const auto& ws = plant.workspace;
  for (const auto& d : ws.discs) {
    if (d.hole_radius <= ws.poles[0].radius) throw ScenarioError("disc '" + d.name + "' hole does not fit the pole");
    if (d.outer_radius <= d.hole_radius) throw ScenarioError("disc '" + d.name + "' outer radius below hole radius");
  }
  if (ws.start_pole < 0 || ws.start_pole > 2 || ws.target_pole < 0 || ws.target_pole > 2 ||
      ws.start_pole == ws.target_pole) {
    throw ScenarioError("start_pole and target_pole must be distinct poles 0, 1 or 2");
  }
  for (const auto& d : ws.discs) {
    if (!(d.connector_width > 0.0 && d.connector_width < ws.jaw_gap_open)) {
      throw ScenarioError("disc '" + d.name + "' connector must be narrower than the open jaw");
    }
  }
  for (int i = 1; i < 3; ++i) {
    if (ws.discs[i].outer_radius <= ws.discs[i - 1].outer_radius) {
      throw ScenarioError("discs must be listed small to large");
    }
  }
}

Scenario ScenarioFromJson(const json& j) {
  Scenario s;
  RejectUnknown(j, "scenario",
                {"name", "seed", "tick_hz", "session_limit_s", "tank", "gripper", "vehicle", "workspace", "damage",
                 "controller", "calibration", "input"});
  Read(j, "name", s.name);
  Read(j, "seed", s.plant.seed);
  Read(j, "tick_hz", s.tick_hz);
  Read(j, "session_limit_s", s.session_limit_s);

  if (j.contains("tank")) {
    const auto& t = j["tank"];
    RejectUnknown(t, "tank", {"length_m", "width_m", "depth_m"});
    Read(t, "length_m", s.plant.tank.length);
    Read(t, "width_m", s.plant.tank.width);
    Read(t, "depth_m", s.plant.tank.depth);
  }
  if (j.contains("gripper")) {
    const auto& g = j["gripper"];
    RejectUnknown(g, "gripper",
                  {"rate_max", "noise_sigma", "actuation_latency_ms", "squeeze_rate_factor", "initial_position"});
    Read(g, "rate_max", s.plant.gripper.rate_max);
    Read(g, "noise_sigma", s.plant.gripper.noise_sigma);
    Read(g, "actuation_latency_ms", s.plant.gripper.actuation_latency_ms);
    Read(g, "squeeze_rate_factor", s.plant.gripper.squeeze_rate_factor);
    Read(g, "initial_position", s.plant.initial_gripper);
  }
  if (j.contains("vehicle")) {
    const auto& v = j["vehicle"];
    RejectUnknown(v, "vehicle",
                  {"v_surge", "v_sway", "v_heave", "yaw_rate_max_deg_s", "attitude_rate_max_deg_s", "half_extent_m",
                   "jaw_offset_m", "initial_position_m", "initial_yaw_deg"});
    auto& p = s.plant.vehicle;
    Read(v, "v_surge", p.v_surge);
    Read(v, "v_sway", p.v_sway);
    Read(v, "v_heave", p.v_heave);
    Read(v, "yaw_rate_max_deg_s", p.yaw_rate_max);
    Read(v, "attitude_rate_max_deg_s", p.attitude_rate_max);
    ReadVec(v, "half_extent_m", p.half_extent);
    ReadVec(v, "jaw_offset_m", p.jaw_offset);
    ReadVec(v, "initial_position_m", s.plant.initial_pose.position);
    Read(v, "initial_yaw_deg", s.plant.initial_pose.yaw);
  }
  if (j.contains("workspace")) {
    const auto& w = j["workspace"];
    RejectUnknown(w, "workspace",
                  {"poles", "discs", "start_pole", "target_pole", "jaw_gap_open_m", "capture_radius_m",
                   "connector_standoff_m", "place_tolerance_m", "jaw_radius_m"});
    auto& ws = s.plant.workspace;
    if (w.contains("poles")) {
      const auto& poles = w["poles"];
      if (!poles.is_array() || poles.size() != 3) throw ScenarioError("workspace.poles must list exactly 3 poles");
      for (std::size_t i = 0; i < 3; ++i) {
        RejectUnknown(poles[i], "workspace.poles", {"base_m", "height_m", "radius_m"});
        ReadVec(poles[i], "base_m", ws.poles[i].base);
        Read(poles[i], "height_m", ws.poles[i].height);
        Read(poles[i], "radius_m", ws.poles[i].radius);
      }
    }
    if (w.contains("discs")) {
      const auto& discs = w["discs"];
      if (!discs.is_array() || discs.size() != 3) throw ScenarioError("workspace.discs must list exactly 3 discs");
      for (std::size_t i = 0; i < 3; ++i) {
        RejectUnknown(discs[i], "workspace.discs",
                      {"name", "outer_radius_m", "hole_radius_m", "thickness_m", "connector_width_m"});
        Read(discs[i], "name", ws.discs[i].name);
        Read(discs[i], "outer_radius_m", ws.discs[i].outer_radius);
        Read(discs[i], "hole_radius_m", ws.discs[i].hole_radius);
        Read(discs[i], "thickness_m", ws.discs[i].thickness);
        Read(discs[i], "connector_width_m", ws.discs[i].connector_width);
      }
    }
    Read(w, "start_pole", ws.start_pole);
    Read(w, "target_pole", ws.target_pole);
    Read(w, "jaw_gap_open_m", ws.jaw_gap_open);
    Read(w, "capture_radius_m", ws.capture_radius);
    Read(w, "connector_standoff_m", ws.connector_standoff);
    Read(w, "place_tolerance_m", ws.place_tolerance);
    Read(w, "jaw_radius_m", ws.jaw_radius);
  }
  if (j.contains("damage")) {
    const auto& d = j["damage"];
    RejectUnknown(d, "damage", {"minor_overgrip", "major_overgrip", "collision_speed_m_s"});
    Read(d, "minor_overgrip", s.plant.damage.minor);
    Read(d, "major_overgrip", s.plant.damage.major);
    Read(d, "collision_speed_m_s", s.plant.damage.collision_speed);
  }
  if (j.contains("controller")) {
    const auto& c = j["controller"];
    RejectUnknown(c, "controller", {"n_tol", "t1_ms", "t2_min_ms", "t2_max_ms", "open_pwm_us", "close_pwm_us", "channel"});
    Read(c, "n_tol", s.controller.n_tol);
    Read(c, "t1_ms", s.controller.t1_ms);
    Read(c, "t2_min_ms", s.controller.t2_min_ms);
    Read(c, "t2_max_ms", s.controller.t2_max_ms);
    Read(c, "open_pwm_us", s.controller.open_pwm_us);
    Read(c, "close_pwm_us", s.controller.close_pwm_us);
    Read(c, "channel", s.controller.channel);
  }
  if (j.contains("calibration")) {
    const auto& c = j["calibration"];
    RejectUnknown(c, "calibration", {"glove", "gripper_pot"});
    if (c.contains("glove")) s.glove = ReadCalibration(c["glove"], "calibration.glove", s.glove);
    if (c.contains("gripper_pot")) s.gripper_pot = ReadCalibration(c["gripper_pot"], "calibration.gripper_pot", s.gripper_pot);
  }
  if (j.contains("input")) {
    const auto& in = j["input"];
    RejectUnknown(in, "input", {"shift_threshold", "theta_max_deg", "camera_channel"});
    Read(in, "shift_threshold", s.shift_threshold);
    Read(in, "theta_max_deg", s.theta_max_deg);
    Read(in, "camera_channel", s.camera_channel);
  }
  s.Validate();
  return s;
}

json ScenarioToJson(const Scenario& s) {
  const auto& p = s.plant;
  json poles = json::array();
  for (const auto& pole : p.workspace.poles) {
    poles.push_back({{"base_m", VecJson(pole.base)}, {"height_m", pole.height}, {"radius_m", pole.radius}});
  }
  json discs = json::array();
  for (const auto& d : p.workspace.discs) {
    discs.push_back({{"name", d.name},
                     {"outer_radius_m", d.outer_radius},
                     {"hole_radius_m", d.hole_radius},
                     {"thickness_m", d.thickness},
                     {"connector_width_m", d.connector_width}});
  }
  return {
      {"name", s.name},
      {"seed", p.seed},
      {"tick_hz", s.tick_hz},
      {"session_limit_s", s.session_limit_s},
      {"tank", {{"length_m", p.tank.length}, {"width_m", p.tank.width}, {"depth_m", p.tank.depth}}},
      {"gripper",
       {{"rate_max", p.gripper.rate_max},
        {"noise_sigma", p.gripper.noise_sigma},
        {"actuation_latency_ms", p.gripper.actuation_latency_ms},
        {"squeeze_rate_factor", p.gripper.squeeze_rate_factor},
        {"initial_position", p.initial_gripper}}},
      {"vehicle",
       {{"v_surge", p.vehicle.v_surge},
        {"v_sway", p.vehicle.v_sway},
        {"v_heave", p.vehicle.v_heave},
        {"yaw_rate_max_deg_s", p.vehicle.yaw_rate_max},
        {"attitude_rate_max_deg_s", p.vehicle.attitude_rate_max},
        {"half_extent_m", VecJson(p.vehicle.half_extent)},
        {"jaw_offset_m", VecJson(p.vehicle.jaw_offset)},
        {"initial_position_m", VecJson(p.initial_pose.position)},
        {"initial_yaw_deg", p.initial_pose.yaw}}},
      {"workspace",
       {{"poles", poles},
        {"discs", discs},
        {"start_pole", p.workspace.start_pole},
        {"target_pole", p.workspace.target_pole},
        {"jaw_gap_open_m", p.workspace.jaw_gap_open},
        {"capture_radius_m", p.workspace.capture_radius},
        {"connector_standoff_m", p.workspace.connector_standoff},
        {"place_tolerance_m", p.workspace.place_tolerance},
        {"jaw_radius_m", p.workspace.jaw_radius}}},
      {"damage",
       {{"minor_overgrip", p.damage.minor},
        {"major_overgrip", p.damage.major},
        {"collision_speed_m_s", p.damage.collision_speed}}},
      {"controller",
       {{"n_tol", s.controller.n_tol},
        {"t1_ms", s.controller.t1_ms},
        {"t2_min_ms", s.controller.t2_min_ms},
        {"t2_max_ms", s.controller.t2_max_ms},
        {"open_pwm_us", s.controller.open_pwm_us},
        {"close_pwm_us", s.controller.close_pwm_us},
        {"channel", s.controller.channel}}},
      {"calibration",
       {{"glove", {{"raw_open", s.glove.raw_open()}, {"raw_closed", s.glove.raw_closed()}}},
        {"gripper_pot", {{"raw_open", s.gripper_pot.raw_open()}, {"raw_closed", s.gripper_pot.raw_closed()}}}}},
      {"input",
       {{"shift_threshold", s.shift_threshold},
        {"theta_max_deg", s.theta_max_deg},
        {"camera_channel", s.camera_channel}}},
  };
}

Scenario ParseScenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return ScenarioFromJson(j);
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str());
}

}  // namespace subsense
