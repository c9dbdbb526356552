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

// Scenario files: JSON documents describing the tank, workspace, plant
// constants, controller tuning, calibrations and seed. Every key is
// optional; missing keys keep their defaults. Schema: docs/scenario.md.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "subsense/gripper_control.hpp"
#include "subsense/plant.hpp"

namespace subsense {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name = "default";
  plant::PlantConfig plant;
  gripper::ControllerConfig controller;
  gripper::GloveCalibration glove{200, 800};
  gripper::GloveCalibration gripper_pot{100, 900};
  double tick_hz = 50.0;
  double shift_threshold = 0.95;
  double theta_max_deg = 30.0;
  double session_limit_s = 1800.0;
  std::uint8_t camera_channel = 8;

  double tick_ms() const { return 1000.0 / tick_hz; }
  /// Throws ScenarioError if any value is out of range.
  void Validate() const;
};

Scenario ScenarioFromJson(const nlohmann::json& j);
nlohmann::json ScenarioToJson(const Scenario& s);
Scenario LoadScenario(const std::filesystem::path& path);
Scenario ParseScenario(const std::string& text);

}  // namespace subsense
