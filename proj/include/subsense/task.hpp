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

// Tower-of-Hanoi rules and session metrics.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subsense/plant.hpp"

namespace subsense::harness {

/// Three stacks of disc ids, bottom first. Disc id order is diameter order:
/// id 0 is the smallest.
struct TohState {
  std::array<std::vector<int>, 3> poles;

  static TohState Initial(int n_discs, int start_pole = 0);
  static TohState FromWorkspace(const plant::TohWorkspace& ws);

  bool IsLegal() const;
  /// All `n_discs` on `pole` in legal order.
  bool IsComplete(int pole, int n_discs) const;
  bool operator==(const TohState&) const = default;
};

class PoleIndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// True iff the top disc of `from` may go onto `to`.
bool LegalMove(const TohState& state, int from_pole, int to_pole);
/// Applies a move without checking legality.
TohState ApplyMove(TohState state, int from_pole, int to_pole);

std::uint64_t MinMoves(int n_discs);

/// Optimal move sequence (from, to) for the classical puzzle.
std::vector<std::pair<int, int>> SolveHanoi(int n_discs, int from_pole, int to_pole);

/// Pick-and-place decomposition the task is described with, next to the
/// classical move minimum. The two counts differ for three discs.
struct SubtaskCounts {
  std::uint64_t classical_min_moves = 0;
  std::optional<std::uint64_t> described_pick_and_place;  // known for 3 discs only
};
SubtaskCounts SubtaskCountsFor(int n_discs);

inline constexpr double kDefaultSessionLimitS = 1800.0;

struct TaskMetrics {
  int subtasks_completed = 0;
  double elapsed_s = 0.0;
  int minor = 0;
  int major = 0;
  int collisions = 0;
  int interventions = 0;
  bool completed = false;

  bool operator==(const TaskMetrics&) const = default;
};

/// Accumulates metrics from plant events and tracks legal pick-and-place
/// moves. A sub-task is a disc lifted from one pole and legally placed on a
/// different pole.
class MetricsTracker {
 public:
  explicit MetricsTracker(const plant::TohWorkspace& ws);

  /// Feeds one tick's events. `ws` is the workspace after the tick.
  void Observe(const std::vector<plant::PlantEvent>& events, const plant::TohWorkspace& ws);
  void SetElapsed(double elapsed_s) { metrics_.elapsed_s = elapsed_s; }
  void Reset(const plant::TohWorkspace& ws);

  const TaskMetrics& metrics() const { return metrics_; }
  const TohState& state() const { return state_; }
  /// Completed pick-and-place moves as (from, to), in order.
  const std::vector<std::pair<int, int>>& moves() const { return moves_; }
  int illegal_placements() const { return illegal_placements_; }

 private:
  TaskMetrics metrics_;
  TohState state_;
  std::vector<std::pair<int, int>> moves_;
  std::optional<int> lifted_from_;
  int illegal_placements_ = 0;
  int target_pole_ = 2;
};

}  // namespace subsense::harness
