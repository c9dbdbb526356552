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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subsense/scenario.hpp"
#include "subsense/session.hpp"
#include "subsense/task.hpp"

namespace subsense::harness {

// -- operators -----------------------------------------------------------------

/// Source of operator input messages. Called once before every tick with
/// the snapshot published by the previous tick.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual std::vector<gateway::InputMessage> Poll(const gateway::StateSnapshot& last, std::uint64_t tick) = 0;
  /// True once a finite script has delivered every message.
  virtual bool Exhausted() const { return false; }
  virtual std::string Name() const = 0;
};

struct TimedInput {
  std::uint64_t tick = 0;
  gateway::InputMessage message;
};

/// Replays a fixed list of messages at their recorded ticks.
class ScriptedOperator : public Operator {
 public:
  explicit ScriptedOperator(std::vector<TimedInput> script);

  std::vector<gateway::InputMessage> Poll(const gateway::StateSnapshot& last, std::uint64_t tick) override;
  bool Exhausted() const override { return next_ >= script_.size(); }
  std::string Name() const override { return "script"; }

 private:
  std::vector<TimedInput> script_;
  std::size_t next_ = 0;
};

/// Closed-loop scripted operator that solves the puzzle optimally. It watches
/// the snapshot stream like a human at the console and answers with glove,
/// controller and head messages only.
class AutopilotOperator : public Operator {
 public:
  explicit AutopilotOperator(const Scenario& scenario);
  ~AutopilotOperator() override;

  std::vector<gateway::InputMessage> Poll(const gateway::StateSnapshot& last, std::uint64_t tick) override;
  bool Exhausted() const override;
  std::string Name() const override { return "autopilot"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// -- event log -------------------------------------------------------------------

inline constexpr int kEventLogVersion = 1;

/// Line-delimited JSON log:
///   {"kind":"session", "version", "scenario", "limit_s", "operator"}
///   {"t_ms", "tick", "kind":"tick", "payload":{"inputs":[...], "events":[...]}}   (only ticks with content)
///   {"kind":"summary", "payload":{metrics..., "ticks", "moves":[[from,to],...]}}
class EventLogWriter {
 public:
  explicit EventLogWriter(std::ostream& out) : out_(out) {}

  void WriteHeader(const Scenario& scenario, double limit_s, const std::string& operator_name);
  void WriteTick(std::int64_t t_ms, std::uint64_t tick, const std::vector<gateway::InputMessage>& inputs,
                 const std::vector<plant::PlantEvent>& events);
  void WriteSummary(const TaskMetrics& metrics, const std::vector<std::pair<int, int>>& moves, std::uint64_t ticks);

 private:
  std::ostream& out_;
};

class EventLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EventLog {
  Scenario scenario;
  double limit_s = kDefaultSessionLimitS;
  std::string operator_name;
  std::vector<TimedInput> inputs;
  std::vector<std::int64_t> timestamps;  // one per tick record, in file order
  std::vector<nlohmann::json> events;
  std::optional<TaskMetrics> summary;
  std::vector<std::pair<int, int>> moves;
  std::optional<std::uint64_t> ticks;  // ticks run, from the summary
};

EventLog ParseEventLog(std::istream& in);
EventLog ReadEventLog(const std::filesystem::path& path);

// -- sessions --------------------------------------------------------------------

struct SessionResult {
  TaskMetrics metrics;
  std::vector<std::pair<int, int>> moves;
  TohState final_state;
  std::uint64_t ticks = 0;
  bool operator_exhausted = false;
  gateway::LinkStats link;
};

/// Runs the fixed-tick loop until the task completes or `limit_s` elapses.
/// When `log` is given the run is recorded for replay.
SessionResult RunSession(const Scenario& scenario, Operator& op, double limit_s, EventLogWriter* log = nullptr,
                         const std::function<void(const gateway::StateSnapshot&)>& on_snapshot = {});

struct ReplayResult {
  SessionResult result;
  std::optional<TaskMetrics> recorded;
  bool matches = false;
};

ReplayResult Replay(const EventLog& log);

// -- reports ---------------------------------------------------------------------

struct MetricAggregate {
  std::string name;
  double total = 0.0;
  double mean = 0.0;
};

struct AggregateReport {
  std::size_t sessions = 0;
  std::size_t completed = 0;
  std::vector<MetricAggregate> rows;

  const MetricAggregate& row(const std::string& name) const;
  nlohmann::json ToJson() const;
  std::string ToText() const;
};

/// Per-metric totals and means. Throws std::invalid_argument on an empty list.
AggregateReport Report(const std::vector<TaskMetrics>& sessions);

// -- gripper step response ----------------------------------------------------------

struct LoopSample {
  std::int64_t t_ms = 0;
  double target = 0.0;
  double measured = 0.0;
  double true_position = 0.0;
  std::optional<int> pwm_us;
  double error_measured = 0.0;
};

struct LoopOptions {
  gripper::ControllerConfig controller;
  plant::GripperParams gripper;
  std::uint64_t seed = 1;
  double tick_hz = 50.0;
  double initial_position = 0.0;
};

/// Gripper controller closed around the gripper plant, no vehicle or wire.
std::vector<LoopSample> RunGripperLoop(const std::function<double(std::int64_t)>& target, std::int64_t duration_ms,
                                       const LoopOptions& opts);

struct StepSpec {
  std::int64_t at_ms = 0;
  double target = 0.0;
};

/// Steps 0 -> 1 -> 0.3 -> 0.8, four seconds apart, starting at 0.5 s.
std::vector<StepSpec> DefaultStepSequence();
std::vector<LoopSample> RunStepResponse(const std::vector<StepSpec>& steps, std::int64_t duration_ms,
                                        const LoopOptions& opts);

struct StepMetrics {
  double from = 0.0;
  double to = 0.0;
  std::optional<double> settle_time_s;  // first entry into the band that is never left
  double overshoot = 0.0;               // max excursion past the target, in the step direction
  double post_settle_max_error = 0.0;
};

/// Evaluates each step on true gripper position against `band`.
std::vector<StepMetrics> AnalyzeSteps(const std::vector<LoopSample>& trace, const std::vector<StepSpec>& steps,
                                      double band);

void WriteStepResponseCsv(std::ostream& out, const std::vector<LoopSample>& trace);

}  // namespace subsense::harness
