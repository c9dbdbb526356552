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

#include "subsense/plant.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace subsense::plant {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double Wrap(double deg) { return input::WrapDegrees(deg); }

}  // namespace

// -- gripper -----------------------------------------------------------------

double GripperRate(int width_us, double rate_max) {
  const int delta = width_us - gripper::kPwmNeutralUs;
  const int magnitude = std::abs(delta) - gripper::kPwmDeadZoneUs;
  if (magnitude <= 0) return 0.0;
  const double authority = static_cast<double>(magnitude) / 370.0;
  // Widths below neutral close the jaws (closure increases).
  return (delta < 0 ? 1.0 : -1.0) * rate_max * std::min(authority, 1.0);
}

GripperPlant::GripperPlant(GripperParams params, std::uint64_t seed, double initial_position)
    : params_(params),
      position_(std::clamp(initial_position, 0.0, 1.0)),
      reported_(position_),
      rng_(seed) {}

void GripperPlant::Integrate(double duration_ms) {
  if (duration_ms <= 0.0) return;
  double rate = GripperRate(active_pwm_us_, params_.rate_max);
  if (rate == 0.0) return;
  double remaining_s = duration_ms / 1000.0;

  if (contact_ && rate > 0.0) {
    const double squeeze = rate * params_.squeeze_rate_factor;
    if (position_ < *contact_) {
      const double to_contact_s = (*contact_ - position_) / rate;
      if (to_contact_s >= remaining_s) {
        position_ += rate * remaining_s;
        return;
      }
      position_ = *contact_;
      remaining_s -= to_contact_s;
    }
    rate = squeeze;
  }
  position_ = std::clamp(position_ + rate * remaining_s, 0.0, 1.0);
}

void GripperPlant::Tick(std::optional<gripper::PwmCommand> incoming, double dt_ms) {
  if (incoming) pending_.emplace_back(time_ms_ + params_.actuation_latency_ms, incoming->width_us());

  const double end = time_ms_ + dt_ms;
  double t = time_ms_;
  while (!pending_.empty() && pending_.front().first < end) {
    const auto [effective, width] = pending_.front();
    pending_.pop_front();
    if (effective > t) {
      Integrate(effective - t);
      t = effective;
    }
    active_pwm_us_ = width;
  }
  Integrate(end - t);
  time_ms_ = end;

  const double noise = params_.noise_sigma > 0.0 ? params_.noise_sigma * noise_(rng_) : 0.0;
  reported_ = std::clamp(position_ + noise, 0.0, 1.0);
}

// -- vehicle -----------------------------------------------------------------

Vec3 BodyToWorld(const Vec3& body, double yaw_deg) {
  const double c = std::cos(yaw_deg * kDegToRad);
  const double s = std::sin(yaw_deg * kDegToRad);
  return {c * body.x - s * body.y, s * body.x + c * body.y, body.z};
}

Vec3 WorldToBody(const Vec3& world, double yaw_deg) { return BodyToWorld(world, -yaw_deg); }

VehiclePlant::VehiclePlant(VehicleParams params, TankBounds tank, VehiclePose initial)
    : params_(params), tank_(tank), pose_(initial) {}

VehicleTickResult VehiclePlant::Tick(const input::VehicleSetpoint& sp, double dt_ms) {
  const double dt = dt_ms / 1000.0;
  const Vec3 body_v{std::clamp(sp.surge, -1.0, 1.0) * params_.v_surge, std::clamp(sp.sway, -1.0, 1.0) * params_.v_sway,
                    std::clamp(sp.heave, -1.0, 1.0) * params_.v_heave};
  const Vec3 world_v = BodyToWorld(body_v, pose_.yaw);

  const Vec3 start = pose_.position;
  Vec3 p = start + world_v * dt;
  const Vec3& h = params_.half_extent;
  bool contact = false;
  auto clamp_axis = [&contact](double& v, double lo, double hi) {
    if (v < lo) {
      v = lo;
      contact = true;
    } else if (v > hi) {
      v = hi;
      contact = true;
    }
  };
  clamp_axis(p.x, h.x, tank_.length - h.x);
  clamp_axis(p.y, h.y, tank_.width - h.y);
  clamp_axis(p.z, h.z, tank_.depth - h.z);
  pose_.position = p;

  pose_.yaw = Wrap(pose_.yaw + std::clamp(sp.yaw, -1.0, 1.0) * params_.yaw_rate_max * dt);
  pose_.roll = Wrap(pose_.roll + std::clamp(sp.roll, -1.0, 1.0) * params_.attitude_rate_max * dt);
  pose_.pitch = Wrap(pose_.pitch + std::clamp(sp.pitch, -1.0, 1.0) * params_.attitude_rate_max * dt);

  VehicleTickResult r;
  r.contact = contact;
  r.new_contact = contact && !in_contact_;
  r.velocity = dt > 0.0 ? (p - start) * (1.0 / dt) : Vec3{};
  in_contact_ = contact;
  return r;
}

Vec3 VehiclePlant::JawPosition() const { return pose_.position + BodyToWorld(params_.jaw_offset, pose_.yaw); }

// -- workspace ---------------------------------------------------------------

WorkspaceConfig WorkspaceConfig::Default() {
  WorkspaceConfig cfg;
  const double spacing = 0.6096;  // 2 ft
  const double center_y = 0.9145;
  for (int i = 0; i < 3; ++i) {
    cfg.poles[i].base = {2.35, center_y + (i - 1) * spacing, 0.15};
    cfg.poles[i].height = 0.3048;
    cfg.poles[i].radius = 0.0095;
  }
  // Smaller discs carry larger centre holes.
  cfg.discs[0] = {"small", 0.040, 0.024, 0.025, 0.03};
  cfg.discs[1] = {"medium", 0.052, 0.019, 0.025, 0.03};
  cfg.discs[2] = {"large", 0.064, 0.015, 0.025, 0.03};
  return cfg;
}

TohWorkspace::TohWorkspace(WorkspaceConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.start_pole < 0 || cfg_.start_pole > 2 || cfg_.target_pole < 0 || cfg_.target_pole > 2) {
    throw std::invalid_argument("start and target poles must be 0, 1 or 2");
  }
  if (cfg_.jaw_gap_open <= 0.0) throw std::invalid_argument("jaw_gap_open must be positive");
  for (const auto& d : cfg_.discs) {
    if (d.connector_width <= 0.0 || d.connector_width >= cfg_.jaw_gap_open) {
      throw std::invalid_argument("disc connector must be narrower than the open jaw");
    }
  }
  stacks_[cfg_.start_pole] = {2, 1, 0};
  for (int d = 0; d < 3; ++d) {
    discs_[d].location = DiscLocation::kOnPole;
    discs_[d].pole = cfg_.start_pole;
    discs_[d].origin_pole = cfg_.start_pole;
  }
  Restack(cfg_.start_pole);
}

void TohWorkspace::Restack(int pole) {
  double z = cfg_.poles[pole].base.z;
  const auto& stack = stacks_[pole];
  for (std::size_t level = 0; level < stack.size(); ++level) {
    const int id = stack[level];
    const double t = cfg_.discs[id].thickness;
    discs_[id].location = DiscLocation::kOnPole;
    discs_[id].pole = pole;
    discs_[id].level = static_cast<int>(level);
    discs_[id].center = {cfg_.poles[pole].base.x, cfg_.poles[pole].base.y, z + t / 2.0};
    z += t;
  }
}

std::optional<int> TohWorkspace::grasped() const {
  for (int d = 0; d < 3; ++d) {
    if (discs_[d].location == DiscLocation::kGrasped) return d;
  }
  return std::nullopt;
}

double TohWorkspace::ContactPosition(int disc) const {
  return 1.0 - cfg_.discs.at(disc).connector_width / cfg_.jaw_gap_open;
}

Vec3 TohWorkspace::ConnectorPosition(int disc) const {
  const auto& spec = cfg_.discs.at(disc);
  return discs_[disc].center - Vec3{spec.outer_radius + cfg_.connector_standoff, 0.0, 0.0};
}

std::vector<int> TohWorkspace::GraspableDiscs() const {
  std::vector<int> out;
  for (const auto& s : stacks_) {
    if (!s.empty()) out.push_back(s.back());
  }
  return out;
}

double TohWorkspace::ThreadClearance(int disc) const {
  // Poles share a radius in practice; use the first.
  return cfg_.discs.at(disc).hole_radius - cfg_.poles[0].radius + cfg_.place_tolerance;
}

std::optional<int> TohWorkspace::CapturingPole(int disc) const {
  const Vec3& c = discs_[disc].center;
  for (int p = 0; p < 3; ++p) {
    const auto& pole = cfg_.poles[p];
    const double d = std::hypot(c.x - pole.base.x, c.y - pole.base.y);
    const double clearance = cfg_.discs[disc].hole_radius - pole.radius + cfg_.place_tolerance;
    if (d <= clearance && c.z >= pole.base.z) return p;
  }
  return std::nullopt;
}

double TohWorkspace::StackTopZ(int pole) const {
  double z = cfg_.poles.at(pole).base.z;
  for (int id : stacks_[pole]) z += cfg_.discs[id].thickness;
  return z;
}

void TohWorkspace::Grasp(int disc, const Vec3& jaw) {
  if (grasped()) throw std::logic_error("a disc is already grasped");
  auto& d = discs_.at(disc);
  if (d.location == DiscLocation::kOnPole) {
    auto& stack = stacks_[d.pole];
    if (stack.empty() || stack.back() != disc) throw std::logic_error("only the top disc of a stack can be grasped");
    stack.pop_back();
    d.origin_pole = d.pole;
  }
  d.location = DiscLocation::kGrasped;
  d.level = -1;
  grasp_offset_ = d.center - jaw;
}

void TohWorkspace::MoveGrasped(const Vec3& jaw) {
  if (auto g = grasped()) discs_[*g].center = jaw + grasp_offset_;
}

DiscState TohWorkspace::Release() {
  auto g = grasped();
  if (!g) throw std::logic_error("no disc is grasped");
  auto& d = discs_[*g];
  if (auto pole = CapturingPole(*g)) {
    stacks_[*pole].push_back(*g);
    Restack(*pole);
  } else {
    d.location = DiscLocation::kLoose;
    d.pole = -1;
    d.level = -1;
    d.center.z = 0.0;
  }
  return d;
}

std::vector<int> TohWorkspace::RestoreLoose() {
  std::vector<int> restored;
  for (int id = 0; id < 3; ++id) {
    auto& d = discs_[id];
    if (d.location != DiscLocation::kLoose) continue;
    stacks_[d.origin_pole].push_back(id);
    Restack(d.origin_pole);
    restored.push_back(id);
  }
  return restored;
}

int TohWorkspace::DiscCount() const {
  int on_pole = 0;
  for (const auto& s : stacks_) on_pole += static_cast<int>(s.size());
  int other = 0;
  for (const auto& d : discs_) {
    if (d.location != DiscLocation::kOnPole) ++other;
  }
  return on_pole + other;
}

// -- ledger ------------------------------------------------------------------

const char* ToString(EventKind k) {
  switch (k) {
    case EventKind::kGrasp:
      return "grasp";
    case EventKind::kPlace:
      return "place";
    case EventKind::kLoose:
      return "loose";
    case EventKind::kMinorDamage:
      return "minor_damage";
    case EventKind::kMajorDamage:
      return "major_damage";
    case EventKind::kCollision:
      return "collision";
    case EventKind::kIntervention:
      return "intervention";
    case EventKind::kRestore:
      return "restore";
  }
  return "?";
}

void DamageLedger::Record(PlantEvent e) {
  switch (e.kind) {
    case EventKind::kMinorDamage:
      ++minor;
      break;
    case EventKind::kMajorDamage:
      ++major;
      break;
    case EventKind::kCollision:
      ++collisions;
      break;
    case EventKind::kIntervention:
      ++interventions;
      break;
    default:
      break;
  }
  events.push_back(std::move(e));
}

// -- world -------------------------------------------------------------------

PlantWorld::PlantWorld(PlantConfig cfg)
    : cfg_(std::move(cfg)),
      gripper_(cfg_.gripper, cfg_.seed, cfg_.initial_gripper),
      vehicle_(cfg_.vehicle, cfg_.tank, cfg_.initial_pose),
      workspace_(cfg_.workspace) {}

void PlantWorld::Emit(std::vector<PlantEvent>& events, EventKind kind, std::string detail, int disc, int pole) {
  PlantEvent e{time_ms_, kind, std::move(detail), disc, pole};
  ledger_.Record(e);
  events.push_back(std::move(e));
}

PlantStepResult PlantWorld::Tick(std::optional<gripper::PwmCommand> gripper_cmd, const input::VehicleSetpoint& sp,
                                 double dt_ms) {
  if (!(dt_ms > 0.0)) throw std::invalid_argument("dt must be positive");
  PlantStepResult out;

  const Vec3 jaw_before = vehicle_.JawPosition();
  const auto vt = vehicle_.Tick(sp, dt_ms);
  time_ms_ += static_cast<TimestampMs>(std::llround(dt_ms));
  if (vt.new_contact) Emit(out.events, EventKind::kCollision, "tank_wall");

  const Vec3 jaw = vehicle_.JawPosition();
  workspace_.MoveGrasped(jaw);

  if (auto g = workspace_.grasped()) {
    gripper_.SetContact(workspace_.ContactPosition(*g));
  } else {
    gripper_.SetContact(std::nullopt);
  }
  prev_closure_ = gripper_.true_position();
  gripper_.Tick(gripper_cmd, dt_ms);

  CheckGrasp(out.events);
  const Vec3 jaw_velocity = (jaw - jaw_before) * (1000.0 / dt_ms);
  CheckDamage(jaw_velocity, vt.velocity, out.events);

  out.button = button_;
  return out;
}

void PlantWorld::CheckGrasp(std::vector<PlantEvent>& events) {
  const double p = gripper_.true_position();
  const Vec3 jaw = vehicle_.JawPosition();

  if (auto g = workspace_.grasped()) {
    if (p >= workspace_.ContactPosition(*g)) {
      button_ = true;
      return;
    }
    const DiscState landed = workspace_.Release();
    button_ = false;
    if (landed.location == DiscLocation::kOnPole) {
      Emit(events, EventKind::kPlace, workspace_.config().discs[*g].name, *g, landed.pole);
    } else {
      Emit(events, EventKind::kLoose, workspace_.config().discs[*g].name, *g);
      Emit(events, EventKind::kIntervention, "disc dropped outside capture region", *g);
    }
    return;
  }

  button_ = false;
  for (int id : workspace_.GraspableDiscs()) {
    const double dist = (workspace_.ConnectorPosition(id) - jaw).Norm();
    // The jaws must close onto the connector; arriving already closed does not grasp.
    const double contact = workspace_.ContactPosition(id);
    if (dist <= workspace_.config().capture_radius && p >= contact && prev_closure_ < contact) {
      const int from = workspace_.discs()[id].pole;
      workspace_.Grasp(id, jaw);
      minor_flagged_ = false;
      major_flagged_ = false;
      button_ = true;
      Emit(events, EventKind::kGrasp, workspace_.config().discs[id].name, id, from);
      return;
    }
  }
}

void PlantWorld::CheckDamage(const Vec3& jaw_velocity, const Vec3& vehicle_velocity, std::vector<PlantEvent>& events) {
  const auto& ws = workspace_.config();

  if (auto g = workspace_.grasped()) {
    const double over = gripper_.true_position() - workspace_.ContactPosition(*g);
    if (over > cfg_.damage.minor && !minor_flagged_) {
      minor_flagged_ = true;
      Emit(events, EventKind::kMinorDamage, "overgrip " + ws.discs[*g].name, *g);
    }
    if (over > cfg_.damage.major && !major_flagged_) {
      major_flagged_ = true;
      Emit(events, EventKind::kMajorDamage, "overgrip " + ws.discs[*g].name, *g);
    }
  }

  const Vec3 jaw = vehicle_.JawPosition();
  const double jaw_speed = jaw_velocity.Norm();
  const auto grasped = workspace_.grasped();
  bool body_contact_any = false;

  for (int p = 0; p < 3; ++p) {
    const auto& pole = ws.poles[p];
    const double top = pole.base.z + pole.height;

    // Jaw against the pole shaft.
    const double jaw_d = std::hypot(jaw.x - pole.base.x, jaw.y - pole.base.y);
    const bool jaw_contact = jaw_d < pole.radius + ws.jaw_radius && jaw.z >= pole.base.z && jaw.z <= top;
    if (jaw_contact && !jaw_pole_contact_[p] && jaw_speed > cfg_.damage.collision_speed) {
      Emit(events, EventKind::kCollision, "jaw_pole", -1, p);
    }
    jaw_pole_contact_[p] = jaw_contact;

    // Held disc body against the pole shaft (the hole threads it without contact).
    bool disc_contact = false;
    if (grasped) {
      const auto& spec = ws.discs[*grasped];
      const Vec3& c = workspace_.discs()[*grasped].center;
      const double d = std::hypot(c.x - pole.base.x, c.y - pole.base.y);
      const double bottom = c.z - spec.thickness / 2.0;
      const double disc_top = c.z + spec.thickness / 2.0;
      disc_contact = d < spec.outer_radius + pole.radius && d > workspace_.ThreadClearance(*grasped) &&
                     bottom < top && disc_top > pole.base.z;
    }
    if (disc_contact && !disc_pole_contact_[p] && jaw_speed > cfg_.damage.collision_speed) {
      Emit(events, EventKind::kCollision, "disc_pole", *grasped, p);
    }
    disc_pole_contact_[p] = disc_contact;

    // Vehicle hull against the pole.
    const auto& pose = vehicle_.pose();
    const Vec3 rel = WorldToBody(pole.base - pose.position, pose.yaw);
    const auto& h = vehicle_.params().half_extent;
    const bool body_contact = std::abs(rel.x) < h.x + pole.radius && std::abs(rel.y) < h.y + pole.radius &&
                              pose.position.z - h.z < top && pose.position.z + h.z > pole.base.z;
    body_contact_any = body_contact_any || body_contact;
  }
  if (body_contact_any && !body_pole_contact_ && vehicle_velocity.Norm() > cfg_.damage.collision_speed) {
    Emit(events, EventKind::kCollision, "hull_pole");
  }
  body_pole_contact_ = body_contact_any;
}

std::vector<PlantEvent> PlantWorld::AcknowledgeIntervention() {
  std::vector<PlantEvent> events;
  for (int id : workspace_.RestoreLoose()) {
    Emit(events, EventKind::kRestore, workspace_.config().discs[id].name, id, workspace_.discs()[id].origin_pole);
  }
  return events;
}

}  // namespace subsense::plant
