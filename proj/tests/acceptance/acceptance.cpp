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


// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures (capped at 1). Optional argv[1]: path to the subsense CLI,
// used to confirm bench-step-response writes its CSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "subsense/gripper_control.hpp"
#include "subsense/haptics.hpp"
#include "subsense/harness.hpp"
#include "subsense/input_mapping.hpp"
#include "subsense/task.hpp"
#include "subsense/wire.hpp"

using namespace subsense;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void Report(const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s  %-22s %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double Since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string Fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// -- deadband -------------------------------------------------------------------

Outcome Deadband() {
  const auto t0 = Clock::now();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0), d(-0.05, 0.05);
  long moves = 0, steps = 0;
  for (int trace = 0; trace < 5; ++trace) {
    gripper::GripperController ctl;
    double p = u(rng);
    for (int k = 0; k < 10000; ++k) {
      p = std::clamp(p + (u(rng) - 0.5) * 0.02, 0.0, 1.0);
      double g;
      do {
        g = std::clamp(p + d(rng), 0.0, 1.0);
      } while (std::abs(g - p) > 0.05);
      const auto cmd = ctl.Step(gripper::NormalizedPosition(g), gripper::NormalizedPosition(p), k * 20);
      if (cmd && !cmd->is_neutral()) ++moves;
      ++steps;
    }
  }
  const double secs = Since(t0);
  return {moves == 0 && secs < 1.0,
          Fmt("%.0f steps in-band, %.0f move commands (want 0), %.3f s (< 1 s)", static_cast<double>(steps),
              static_cast<double>(moves), secs)};
}

// -- T2 law -------------------------------------------------------------------------

Outcome T2Law() {
  const gripper::ControllerConfig cfg;
  bool ok = gripper::T2ForError(0.05, cfg) == 300.0 && gripper::T2ForError(1.0, cfg) == 10.0;
  double prev = 1e9, worst_oracle = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double e = i / 1000.0;
    const double t = gripper::T2ForError(e, cfg);
    ok = ok && t <= prev && t >= 10.0 && t <= 300.0;
    worst_oracle = std::max(worst_oracle, std::abs(t - oracle::T2(e)));
    prev = t;
  }
  ok = ok && worst_oracle < 1e-9;
  return {ok, Fmt("T2(0.05)=%.1f T2(1)=%.1f, 1001-pt sweep monotone in [10,300], max |T2-oracle|=%.1e",
                  gripper::T2ForError(0.05, cfg), gripper::T2ForError(1.0, cfg), worst_oracle)};
}

// -- pulse timing -------------------------------------------------------------------

Outcome PulseTiming() {
  harness::LoopOptions opts;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> targets(61);
  for (auto& t : targets) t = u(rng);
  const auto trace =
      harness::RunGripperLoop([&](std::int64_t t) { return targets[static_cast<std::size_t>(t / 1000)]; }, 60000, opts);

  int moves = 0, bad_neutral = 0, bad_gap = 0;
  double worst_neutral = 0.0, worst_gap_slack = 1e9;
  std::optional<std::int64_t> pending;
  std::optional<std::int64_t> last_move;
  double last_e = 0.0;
  for (const auto& s : trace) {
    if (!s.pwm_us) continue;
    if (*s.pwm_us == gripper::kPwmNeutralUs) {
      if (!pending) {
        ++bad_neutral;
        continue;
      }
      const double dt = static_cast<double>(s.t_ms - *pending);
      worst_neutral = std::max(worst_neutral, std::abs(dt - 45.0));
      if (std::abs(dt - 45.0) > 20.0) ++bad_neutral;
      pending.reset();
      continue;
    }
    ++moves;
    if (pending) ++bad_neutral;  // move before its neutral
    if (last_move) {
      const double slack = static_cast<double>(s.t_ms - *last_move) - (oracle::T2(last_e) - 20.0);
      worst_gap_slack = std::min(worst_gap_slack, slack);
      if (slack < 0.0) ++bad_gap;
    }
    pending = last_move = s.t_ms;
    last_e = std::abs(s.error_measured);
  }
  if (pending && trace.back().t_ms - *pending >= 65) ++bad_neutral;
  return {moves > 100 && bad_neutral == 0 && bad_gap == 0,
          Fmt("%.0f moves over 60 s; neutral offset max |dt-45|=%.0f ms (<= 20); min gap slack %.0f ms (>= 0); "
              "violations %.0f",
              moves, worst_neutral, worst_gap_slack, bad_neutral + bad_gap)};
}

// -- step response ------------------------------------------------------------------

struct StepStats {
  double settle_s = 1e9, overshoot = 0.0, post = 0.0;
};

// Independent analysis on true position: settle is the first sample after the
// last excursion outside the band.
StepStats Analyze(const std::vector<harness::LoopSample>& trace, std::int64_t begin, std::int64_t end, double from,
                  double to) {
  StepStats st;
  const double dir = to >= from ? 1.0 : -1.0;
  std::vector<const harness::LoopSample*> seg;
  for (const auto& s : trace) {
    if (s.t_ms >= begin && s.t_ms < end) seg.push_back(&s);
  }
  std::ptrdiff_t last_out = -1;
  for (std::size_t k = 0; k < seg.size(); ++k) {
    const double e = seg[k]->true_position - to;
    st.overshoot = std::max(st.overshoot, dir * e);
    if (std::abs(e) > 0.05) last_out = static_cast<std::ptrdiff_t>(k);
  }
  const auto idx = static_cast<std::size_t>(last_out + 1);
  if (idx < seg.size()) {
    st.settle_s = static_cast<double>(seg[idx]->t_ms - begin) / 1000.0;
    for (std::size_t k = idx; k < seg.size(); ++k) st.post = std::max(st.post, std::abs(seg[k]->true_position - to));
  }
  return st;
}

Outcome StepResponse(const char* cli) {
  const auto t0 = Clock::now();
  const std::vector<harness::StepSpec> steps{{0, 0.0}, {500, 1.0}, {4500, 0.3}, {8500, 0.8}};
  const std::int64_t duration = 12500;
  double worst_settle = 0.0, worst_over = 0.0, worst_post = 0.0;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 42}) {
    harness::LoopOptions opts;
    opts.seed = seed;
    const auto trace = harness::RunStepResponse(steps, duration, opts);
    for (std::size_t i = 1; i < steps.size(); ++i) {
      const std::int64_t end = i + 1 < steps.size() ? steps[i + 1].at_ms : duration + 1;
      const auto st = Analyze(trace, steps[i].at_ms, end, steps[i - 1].target, steps[i].target);
      worst_settle = std::max(worst_settle, st.settle_s);
      worst_over = std::max(worst_over, st.overshoot);
      worst_post = std::max(worst_post, st.post);
      ok = ok && st.settle_s <= 3.0 && st.overshoot <= 0.10 && st.post <= 0.05;
    }
  }
  std::string csv_note = "CLI csv not checked";
  if (cli) {
    const auto path = std::filesystem::temp_directory_path() / "subsense_acceptance_step.csv";
    const std::string cmd = std::string("\"") + cli + "\" bench-step-response --out \"" + path.string() + "\" 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    const bool csv_ok = rc == 0 && header == "t_ms,target,measured,true_position,pwm_us" && rows > 500;
    ok = ok && csv_ok;
    csv_note = csv_ok ? "CLI csv ok (" + std::to_string(rows) + " rows)" : "CLI csv missing or malformed";
    std::filesystem::remove(path);
  }
  const double secs = Since(t0);
  ok = ok && secs < 5.0;
  return {ok, Fmt("6 seeds x 3 steps: settle max %.2f s (<= 3), overshoot max %.3f (<= 0.10), post-settle max %.3f "
                  "(<= 0.05), %.2f s (< 5 s); ",
                  worst_settle, worst_over, worst_post, secs) +
                  csv_note};
}

// -- haptics ------------------------------------------------------------------------

Outcome Haptics() {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> run_len(1, 200);
  int traces = 0, edges = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<bool> b;
    bool level = trial % 2 == 1;  // half the traces start held
    while (b.size() < 3000) {
      const int n = run_len(rng);
      b.insert(b.end(), static_cast<std::size_t>(n), level);
      level = !level;
    }
    haptics::HapticDriver d;
    d.Reset(b[0]);
    std::vector<bool> v(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) v[i] = d.Update(b[i], static_cast<std::int64_t>(i) * 20);

    int rising = 0, starts = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const bool prev_b = i > 0 ? b[i - 1] : b[0];
      if (b[i] && !prev_b) {
        ++rising;
        std::size_t hold = 0, vib = 0;
        while (i + hold < b.size() && b[i + hold]) ++hold;
        while (i + vib < v.size() && v[i + vib]) ++vib;
        const double err = std::abs(vib * 20.0 - std::min(2000.0, hold * 20.0));
        worst = std::max(worst, err);
        if (err > 20.0 && i + hold < b.size()) ++bad;
      }
      if (v[i] && (i == 0 || !v[i - 1])) ++starts;
    }
    if (starts != rising) ++bad;
    edges += rising;
    ++traces;
  }
  return {bad == 0, Fmt("%.0f traces, %.0f rising edges, max |interval-min(2000,hold)|=%.0f ms (<= 20), %.0f mismatches",
                        traces, edges, worst, bad)};
}

// -- wire ---------------------------------------------------------------------------

Outcome Wire() {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> b8(0, 255), pot(0, 1023), bit(0, 1), axis(-1000, 1000), width(1100, 1900);
  int round_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    const wire::SensorFrame f{static_cast<std::uint8_t>(b8(rng)), static_cast<std::uint16_t>(pot(rng)), bit(rng) == 1};
    const auto d = wire::DecodeSensorFrame(wire::EncodeSensorFrame(f));
    if (!d || !(*d.value == f)) ++round_fail;

    const auto s = wire::MakeSetServo(static_cast<std::uint8_t>(b8(rng)),
                                      {static_cast<std::uint8_t>(b8(rng)), static_cast<std::uint16_t>(width(rng))});
    const auto ds = wire::DecodeCommand(wire::EncodeCommand(s));
    if (!ds || !(*ds.value == s)) ++round_fail;

    wire::ManualSetpoint m;
    for (auto& a : m.axes) a = static_cast<std::int16_t>(axis(rng));
    const auto dm = wire::DecodeCommand(wire::EncodeCommand(wire::MakeManualSetpoint(static_cast<std::uint8_t>(b8(rng)), m)));
    if (!dm || !(*wire::ParseManualSetpoint(*dm.value).value == m)) ++round_fail;
  }

  int flips = 0, accepted = 0;
  wire::ManualSetpoint m;
  m.axes = {1000, -1000, 250, -250, 7, -7};
  const std::vector<wire::Bytes> goods{wire::EncodeSensorFrame({200, 777, true}),
                                       wire::EncodeCommand(wire::MakeSetServo(42, {9, 1300})),
                                       wire::EncodeCommand(wire::MakeManualSetpoint(9, m))};
  for (const auto& good : goods) {
    for (std::size_t k = 0; k < good.size() * 8; ++k) {
      auto b = good;
      b[k / 8] ^= static_cast<std::uint8_t>(1u << (k % 8));
      ++flips;
      if (wire::IsValidFrame(b) || wire::DecodeSensorFrame(b) || wire::DecodeCommand(b)) ++accepted;
    }
  }

  const std::vector<std::vector<std::uint8_t>> vectors{
      oracle::CheckString(), {0x04, 0x00, 0x02, 0x01, 0x07}, {0x03, 0x00, 0xFF, 0x00, 0x01, 0x00, 0x09, 0x14, 0x05}};
  int crc_bad = 0;
  for (const auto& v : vectors) {
    const wire::ByteView view(v.data(), v.size());
    if (wire::Crc16CcittFalse(view) != oracle::CcittFalseBitwise(v)) ++crc_bad;
    if (wire::Crc16X25(view) != oracle::X25Bitwise(v)) ++crc_bad;
    if (wire::Crc16CcittFalse(view) != oracle::CcittFalseBoost(v)) ++crc_bad;
    if (wire::Crc16X25(view) != oracle::X25Boost(v)) ++crc_bad;
  }
  const wire::ByteView check(oracle::CheckString().data(), oracle::CheckString().size());
  if (wire::Crc16CcittFalse(check) != oracle::kCcittFalseCheck || wire::Crc16X25(check) != oracle::kX25Check) ++crc_bad;

  return {round_fail == 0 && accepted == 0 && crc_bad == 0,
          Fmt("3x10000 round trips (%.0f failed); %.0f single-bit flips, %.0f accepted; 3 CRC vectors x 2 algorithms, "
              "%.0f oracle mismatches",
              round_fail, flips, accepted, crc_bad)};
}

// -- Towers of Hanoi ----------------------------------------------------------------

Outcome Hanoi() {
  int mismatches = 0, pairs = 0;
  for (int code = 0; code < 27; ++code) {
    const auto s = oracle::Decode(code);
    harness::TohState t;
    t.poles = oracle::Stacks(s);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        ++pairs;
        if (harness::LegalMove(t, a, b) != oracle::BruteForceLegal(s, a, b)) ++mismatches;
      }
    }
  }
  const int bfs = oracle::BfsDistance({0, 0, 0}, {2, 2, 2});
  const bool ok = mismatches == 0 && bfs == 7 && harness::MinMoves(3) == 7 && harness::SolveHanoi(3, 0, 2).size() == 7;
  return {ok, Fmt("27 states x 9 moves = %.0f checks, %.0f mismatches; BFS shortest = %.0f (want 7 = 2^3-1)", pairs,
                  mismatches, bfs)};
}

// -- golden end-to-end --------------------------------------------------------------

Outcome Golden() {
  const auto t0 = Clock::now();
  const Scenario sc;

  std::ostringstream log_a, log_b;
  harness::EventLogWriter wa(log_a), wb(log_b);
  harness::AutopilotOperator op_a(sc), op_b(sc);
  const auto a = harness::RunSession(sc, op_a, sc.session_limit_s, &wa);
  const auto b = harness::RunSession(sc, op_b, sc.session_limit_s, &wb);

  std::istringstream in(log_a.str());
  const auto replay = harness::Replay(harness::ParseEventLog(in));

  const auto& m = a.metrics;
  const bool clean = m.completed && m.subtasks_completed == 7 && m.minor == 0 && m.major == 0 && m.interventions == 0;
  const bool deterministic = a.metrics == b.metrics && a.moves == b.moves && log_a.str() == log_b.str();
  const bool replay_ok = replay.matches && replay.result.metrics == m;
  const double secs = Since(t0);
  return {clean && deterministic && replay_ok && secs < 30.0,
          Fmt("completed=%.0f subtasks=%.0f minor=%.0f major=%.0f", m.completed, m.subtasks_completed, m.minor,
              m.major) +
              Fmt(" interventions=%.0f sim=%.1f s; ", m.interventions, m.elapsed_s) +
              (deterministic ? "two runs identical; " : "runs differ; ") +
              (replay_ok ? "replay identical; " : "replay differs; ") + Fmt("%.2f s (< 30 s)", secs)};
}

// -- input mapping ------------------------------------------------------------------

Outcome InputMapping() {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> wide(-3.0, 3.0), angle(-400.0, 400.0);
  int bad = 0, shifted = 0, n = 0;
  for (; n < 50000; ++n) {
    const input::ControllerInputs in{wide(rng), wide(rng), wide(rng), wide(rng)};
    const input::HmdPose pose{angle(rng), angle(rng), angle(rng)};
    const auto c = input::MapController(in);
    const auto sp = input::MergeSetpoints(c, input::MapHmd(pose));
    const auto clamped = in.Clamped();
    if (c.shifted) {
      ++shifted;
      if (sp.sway != 0.0 || sp.heave != 0.0 || sp.surge != -clamped.finger_trigger) ++bad;
    } else {
      if (sp.roll != 0.0 || sp.pitch != 0.0 || sp.surge != clamped.finger_trigger) ++bad;
    }
    if (std::abs(sp.camera_tilt_deg) > 45.0) ++bad;
  }
  for (double p : {45.0, 46.0, 90.0, 179.0}) {
    if (input::MapHmd({0.0, p, 0.0}).camera_tilt_deg != 45.0) ++bad;
    if (input::MapHmd({0.0, -p, 0.0}).camera_tilt_deg != -45.0) ++bad;
  }
  if (input::MapHmd({0.0, 30.0, 0.0}).camera_tilt_deg != 30.0) ++bad;
  return {bad == 0 && shifted > 0 && shifted < n,
          Fmt("%.0f random inputs (%.0f shifted): shift exclusivity, surge sign, camera clamp at +/-45 exact; "
              "%.0f violations",
              n, shifted, bad)};
}

// -- standalone build ---------------------------------------------------------------

Outcome Standalone() {
#ifndef SUBSENSE_BUILD_TARGETS
#define SUBSENSE_BUILD_TARGETS ""
#endif
  const std::string targets = SUBSENSE_BUILD_TARGETS;
  const bool console = targets.find("console") != std::string::npos || targets.find("npm") != std::string::npos;
  return {!console, "build targets: " + targets + "; this binary links the core library only"};
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  Report("deadband", Deadband);
  Report("t2-law", T2Law);
  Report("pulse-timing", PulseTiming);
  Report("step-response", [cli] { return StepResponse(cli); });
  Report("haptic-rule", Haptics);
  Report("wire-integrity", Wire);
  Report("toh-oracle", Hanoi);
  Report("golden-end-to-end", Golden);
  Report("input-mapping", InputMapping);
  Report("standalone-build", Standalone);
  std::printf("%s: %d failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
