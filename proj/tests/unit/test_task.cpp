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

#include "oracles.hpp"
#include "subsense/task.hpp"

using namespace subsense;
using namespace subsense::harness;

namespace {

TohState FromOracle(const oracle::HanoiState& s) {
  TohState t;
  t.poles = oracle::Stacks(s);
  return t;
}

}  // namespace

TEST_CASE("legal move examples") {
  const auto init = TohState::Initial(3);
  CHECK(init.poles[0] == std::vector<int>{2, 1, 0});
  CHECK(LegalMove(init, 0, 1));
  CHECK_FALSE(LegalMove(init, 1, 2));  // empty source

  TohState s;
  s.poles = {std::vector<int>{2}, std::vector<int>{0}, std::vector<int>{1}};
  CHECK_FALSE(LegalMove(s, 0, 1));  // large onto small
  CHECK(LegalMove(s, 1, 0));
  CHECK_FALSE(LegalMove(s, 1, 1));

  CHECK_THROWS_AS(LegalMove(init, 3, 0), PoleIndexError);
  CHECK_THROWS_AS(LegalMove(init, 0, -1), PoleIndexError);
}

TEST_CASE("legal_move agrees with the brute-force rules on all 27 states") {
  int checked = 0;
  for (int code = 0; code < 27; ++code) {
    const auto s = oracle::Decode(code);
    const auto t = FromOracle(s);
    CHECK(t.IsLegal());
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        CHECK(LegalMove(t, a, b) == oracle::BruteForceLegal(s, a, b));
        ++checked;
      }
    }
  }
  CHECK(checked == 27 * 9);
}

TEST_CASE("min moves, solver and bfs agree") {
  CHECK(MinMoves(1) == 1);
  CHECK(MinMoves(3) == 7);
  CHECK(MinMoves(10) == 1023);
  CHECK_THROWS(MinMoves(0));
  CHECK(oracle::BfsDistance({0, 0, 0}, {2, 2, 2}) == 7);
  CHECK(static_cast<int>(MinMoves(3)) == oracle::BfsDistance({0, 0, 0}, {2, 2, 2}));

  const auto moves = SolveHanoi(3, 0, 2);
  REQUIRE(moves.size() == 7);
  auto s = TohState::Initial(3);
  for (const auto& [a, b] : moves) {
    CHECK(LegalMove(s, a, b));
    s = ApplyMove(s, a, b);
    CHECK(s.IsLegal());
  }
  CHECK(s.IsComplete(2, 3));
}

TEST_CASE("sub-task counts surface both numbers") {
  const auto c = SubtaskCountsFor(3);
  CHECK(c.classical_min_moves == 7);
  REQUIRE(c.described_pick_and_place);
  CHECK(*c.described_pick_and_place == 6);
  CHECK_FALSE(SubtaskCountsFor(4).described_pick_and_place);
}

TEST_CASE("illegal stacks are detected") {
  TohState s;
  s.poles = {std::vector<int>{0, 1}, std::vector<int>{2}, std::vector<int>{}};
  CHECK_FALSE(s.IsLegal());
  CHECK_FALSE(s.IsComplete(2, 3));
}

TEST_CASE("metrics tracker counts placements on a different pole only") {
  plant::TohWorkspace ws(plant::WorkspaceConfig::Default());
  MetricsTracker t(ws);
  using plant::EventKind;
  using plant::PlantEvent;

  // Lift the small disc and put it back where it came from: not a sub-task.
  ws.Grasp(0, ws.ConnectorPosition(0));
  t.Observe({PlantEvent{0, EventKind::kGrasp, "small", 0, 0}}, ws);
  ws.Release();
  t.Observe({PlantEvent{20, EventKind::kPlace, "small", 0, 0}}, ws);
  CHECK(t.metrics().subtasks_completed == 0);

  t.Observe({PlantEvent{40, EventKind::kCollision, "tank_wall"}}, ws);
  t.Observe({PlantEvent{60, EventKind::kMinorDamage, "x", 0}}, ws);
  CHECK(t.metrics().collisions == 1);
  CHECK(t.metrics().minor == 1);
  t.Reset(ws);
  CHECK(t.metrics() == TaskMetrics{});
}
