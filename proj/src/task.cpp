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

#include "subsense/task.hpp"

#include <string>

namespace subsense::harness {

namespace {

void CheckPole(int pole) {
  if (pole < 0 || pole > 2) throw PoleIndexError("pole index " + std::to_string(pole) + " outside [0, 2]");
}

void Solve(int n, int from, int to, int via, std::vector<std::pair<int, int>>& out) {
  if (n == 0) return;
  Solve(n - 1, from, via, to, out);
  out.emplace_back(from, to);
  Solve(n - 1, via, to, from, out);
}

}  // namespace

TohState TohState::Initial(int n_discs, int start_pole) {
  CheckPole(start_pole);
  TohState s;
  for (int id = n_discs - 1; id >= 0; --id) s.poles[start_pole].push_back(id);
  return s;
}

TohState TohState::FromWorkspace(const plant::TohWorkspace& ws) {
  TohState s;
  for (int p = 0; p < 3; ++p) s.poles[p] = ws.stack(p);
  return s;
}

bool TohState::IsLegal() const {
  for (const auto& stack : poles) {
    for (std::size_t i = 1; i < stack.size(); ++i) {
      if (stack[i] >= stack[i - 1]) return false;
    }
  }
  return true;
}

bool TohState::IsComplete(int pole, int n_discs) const {
  CheckPole(pole);
  return static_cast<int>(poles[pole].size()) == n_discs && IsLegal();
}

bool LegalMove(const TohState& state, int from_pole, int to_pole) {
  CheckPole(from_pole);
  CheckPole(to_pole);
  const auto& from = state.poles[from_pole];
  const auto& to = state.poles[to_pole];
  if (from.empty()) return false;
  if (from_pole == to_pole) return false;
  return to.empty() || to.back() > from.back();
}

TohState ApplyMove(TohState state, int from_pole, int to_pole) {
  CheckPole(from_pole);
  CheckPole(to_pole);
  auto& from = state.poles[from_pole];
  if (from.empty()) throw std::logic_error("move from an empty pole");
  const int disc = from.back();
  from.pop_back();
  state.poles[to_pole].push_back(disc);
  return state;
}

std::uint64_t MinMoves(int n_discs) {
  if (n_discs < 1 || n_discs > 63) throw std::invalid_argument("n_discs must lie in [1, 63]");
  return (std::uint64_t{1} << n_discs) - 1;
}

std::vector<std::pair<int, int>> SolveHanoi(int n_discs, int from_pole, int to_pole) {
  CheckPole(from_pole);
  CheckPole(to_pole);
  std::vector<std::pair<int, int>> out;
  if (from_pole == to_pole) return out;
  Solve(n_discs, from_pole, to_pole, 3 - from_pole - to_pole, out);
  return out;
}

SubtaskCounts SubtaskCountsFor(int n_discs) {
  SubtaskCounts c;
  c.classical_min_moves = MinMoves(n_discs);
  if (n_discs == 3) c.described_pick_and_place = 6;
  return c;
}

MetricsTracker::MetricsTracker(const plant::TohWorkspace& ws) { Reset(ws); }

void MetricsTracker::Reset(const plant::TohWorkspace& ws) {
  metrics_ = {};
  moves_.clear();
  lifted_from_.reset();
  illegal_placements_ = 0;
  target_pole_ = ws.config().target_pole;
  state_ = TohState::FromWorkspace(ws);
}

void MetricsTracker::Observe(const std::vector<plant::PlantEvent>& events, const plant::TohWorkspace& ws) {
  using plant::EventKind;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::kGrasp:
        lifted_from_ = e.pole;
        if (e.pole >= 0 && !state_.poles[e.pole].empty()) state_.poles[e.pole].pop_back();
        break;
      case EventKind::kPlace: {
        const auto& to = state_.poles.at(e.pole);
        const bool legal = to.empty() || to.back() > e.disc;
        if (!legal) {
          ++illegal_placements_;
        } else if (lifted_from_ && *lifted_from_ != e.pole) {
          ++metrics_.subtasks_completed;
          moves_.emplace_back(*lifted_from_, e.pole);
        }
        state_.poles[e.pole].push_back(e.disc);
        lifted_from_.reset();
        break;
      }
      case EventKind::kLoose:
        lifted_from_.reset();
        break;
      case EventKind::kMinorDamage:
        ++metrics_.minor;
        break;
      case EventKind::kMajorDamage:
        ++metrics_.major;
        break;
      case EventKind::kCollision:
        ++metrics_.collisions;
        break;
      case EventKind::kIntervention:
        ++metrics_.interventions;
        break;
      case EventKind::kRestore:
        break;
    }
  }
  state_ = TohState::FromWorkspace(ws);
  const int n = static_cast<int>(ws.discs().size());
  metrics_.completed = metrics_.completed || state_.IsComplete(target_pole_, n);
}

}  // namespace subsense::harness
