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

#include "subsense/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "subsense/protocol.hpp"

namespace subsense::harness {

using nlohmann::json;

// -- scripted operator -----------------------------------------------------------

ScriptedOperator::ScriptedOperator(std::vector<TimedInput> script) : script_(std::move(script)) {
  std::stable_sort(script_.begin(), script_.end(),
                   [](const TimedInput& a, const TimedInput& b) { return a.tick < b.tick; });
}

std::vector<gateway::InputMessage> ScriptedOperator::Poll(const gateway::StateSnapshot&, std::uint64_t tick) {
  std::vector<gateway::InputMessage> out;
  while (next_ < script_.size() && script_[next_].tick <= tick) out.push_back(script_[next_++].message);
  return out;
}

// -- event log -------------------------------------------------------------------

void EventLogWriter::WriteHeader(const Scenario& scenario, double limit_s, const std::string& operator_name) {
  json j{{"kind", "session"},
         {"version", kEventLogVersion},
         {"scenario", ScenarioToJson(scenario)},
         {"limit_s", limit_s},
         {"operator", operator_name}};
  out_ << j.dump() << '\n';
}

void EventLogWriter::WriteTick(std::int64_t t_ms, std::uint64_t tick, const std::vector<gateway::InputMessage>& inputs,
                               const std::vector<plant::PlantEvent>& events) {
  if (inputs.empty() && events.empty()) return;
  json in = json::array();
  for (const auto& m : inputs) in.push_back(gateway::InputToJson(m));
  json ev = json::array();
  for (const auto& e : events) ev.push_back(gateway::EventToJson(e));
  json j{{"t_ms", t_ms}, {"tick", tick}, {"kind", "tick"}, {"payload", {{"inputs", in}, {"events", ev}}}};
  out_ << j.dump() << '\n';
}

void EventLogWriter::WriteSummary(const TaskMetrics& metrics, const std::vector<std::pair<int, int>>& moves,
                                  std::uint64_t ticks) {
  json payload = gateway::MetricsToJson(metrics);
  payload["ticks"] = ticks;
  json mv = json::array();
  for (const auto& [from, to] : moves) mv.push_back({from, to});
  payload["moves"] = mv;
  out_ << json{{"kind", "summary"}, {"payload", payload}}.dump() << '\n';
  out_.flush();
}

EventLog ParseEventLog(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw EventLogError("malformed JSON" + where);
    }
    const std::string kind = j.value("kind", "");
    try {
      if (kind == "session") {
        if (j.value("version", 0) != kEventLogVersion) throw EventLogError("unsupported log version" + where);
        log.scenario = ScenarioFromJson(j.at("scenario"));
        log.limit_s = j.at("limit_s").get<double>();
        log.operator_name = j.value("operator", "");
        have_header = true;
      } else if (kind == "tick") {
        if (!have_header) throw EventLogError("tick record before session header" + where);
        const auto tick = j.at("tick").get<std::uint64_t>();
        log.timestamps.push_back(j.at("t_ms").get<std::int64_t>());
        for (const auto& m : j.at("payload").at("inputs")) log.inputs.push_back({tick, gateway::InputFromJson(m)});
        for (const auto& e : j.at("payload").at("events")) log.events.push_back(e);
      } else if (kind == "summary") {
        const auto& p = j.at("payload");
        log.summary = gateway::MetricsFromJson(p);
        if (p.contains("ticks")) log.ticks = p.at("ticks").get<std::uint64_t>();
        for (const auto& mv : p.value("moves", json::array())) log.moves.emplace_back(mv.at(0), mv.at(1));
      } else {
        throw EventLogError("unknown record kind '" + kind + "'" + where);
      }
    } catch (const json::exception& e) {
      throw EventLogError(std::string("bad record: ") + e.what() + where);
    } catch (const std::invalid_argument& e) {
      throw EventLogError(std::string("bad input message: ") + e.what() + where);
    } catch (const ScenarioError& e) {
      throw EventLogError(std::string("bad scenario: ") + e.what() + where);
    }
  }
  if (!have_header) throw EventLogError("log has no session header");
  return log;
}

EventLog ReadEventLog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EventLogError("cannot open log " + path.string());
  return ParseEventLog(in);
}

// -- sessions --------------------------------------------------------------------

SessionResult RunSession(const Scenario& scenario, Operator& op, double limit_s, EventLogWriter* log,
                         const std::function<void(const gateway::StateSnapshot&)>& on_snapshot) {
  gateway::Session session(scenario);
  const auto max_ticks = static_cast<std::uint64_t>(std::llround(limit_s * scenario.tick_hz));
  if (log) log->WriteHeader(scenario, limit_s, op.Name());

  while (session.tick_index() < max_ticks) {
    const std::uint64_t tick = session.tick_index();
    const std::int64_t t_ms = session.now_ms();
    auto inputs = op.Poll(session.snapshot(), tick);
    const auto& snap = session.Tick(inputs);
    if (log) log->WriteTick(t_ms, tick, inputs, snap.events);
    if (on_snapshot) on_snapshot(snap);
    if (snap.metrics.completed) break;
  }

  SessionResult r;
  r.metrics = session.Metrics();
  r.moves = session.tracker().moves();
  r.final_state = session.tracker().state();
  r.ticks = session.tick_index();
  r.operator_exhausted = op.Exhausted();
  r.link = session.link_stats();
  if (log) log->WriteSummary(r.metrics, r.moves, r.ticks);
  return r;
}

ReplayResult Replay(const EventLog& log) {
  ScriptedOperator op(log.inputs);
  ReplayResult rr;
  double limit_s = log.limit_s;
  if (log.ticks) limit_s = std::min(limit_s, static_cast<double>(*log.ticks) / log.scenario.tick_hz);
  rr.result = RunSession(log.scenario, op, limit_s);
  rr.recorded = log.summary;
  rr.matches = log.summary && *log.summary == rr.result.metrics && log.moves == rr.result.moves;
  return rr;
}

// -- reports ---------------------------------------------------------------------

const MetricAggregate& AggregateReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no metric named " + name);
}

json AggregateReport::ToJson() const {
  json metrics = json::object();
  for (const auto& r : rows) metrics[r.name] = {{"total", r.total}, {"mean", r.mean}};
  return {{"sessions", sessions}, {"completed", completed}, {"metrics", metrics}};
}

std::string AggregateReport::ToText() const {
  std::ostringstream os;
  os << "sessions: " << sessions << "  completed: " << completed << "\n";
  os << std::left << std::setw(20) << "metric" << std::right << std::setw(12) << "total" << std::setw(12) << "mean"
     << "\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    os << std::left << std::setw(20) << r.name << std::right << std::setw(12) << r.total << std::setw(12) << r.mean
       << "\n";
  }
  return os.str();
}

AggregateReport Report(const std::vector<TaskMetrics>& sessions) {
  if (sessions.empty()) throw std::invalid_argument("report needs at least one session");
  AggregateReport rep;
  rep.sessions = sessions.size();
  const auto add = [&](const std::string& name, auto field) {
    MetricAggregate m{name, 0.0, 0.0};
    for (const auto& s : sessions) m.total += static_cast<double>(field(s));
    m.mean = m.total / static_cast<double>(sessions.size());
    rep.rows.push_back(m);
  };
  add("subtasks_completed", [](const TaskMetrics& m) { return m.subtasks_completed; });
  add("elapsed_s", [](const TaskMetrics& m) { return m.elapsed_s; });
  add("minor", [](const TaskMetrics& m) { return m.minor; });
  add("major", [](const TaskMetrics& m) { return m.major; });
  add("collisions", [](const TaskMetrics& m) { return m.collisions; });
  add("interventions", [](const TaskMetrics& m) { return m.interventions; });
  add("completed", [](const TaskMetrics& m) { return m.completed ? 1 : 0; });
  rep.completed = static_cast<std::size_t>(rep.row("completed").total);
  return rep;
}

// -- gripper step response ----------------------------------------------------------

std::vector<LoopSample> RunGripperLoop(const std::function<double(std::int64_t)>& target, std::int64_t duration_ms,
                                       const LoopOptions& opts) {
  gripper::GripperController controller(opts.controller);
  plant::GripperPlant plant(opts.gripper, opts.seed, opts.initial_position);
  const double dt = 1000.0 / opts.tick_hz;

  std::vector<LoopSample> trace;
  for (std::int64_t k = 0;; ++k) {
    const auto now = static_cast<std::int64_t>(std::llround(static_cast<double>(k) * dt));
    if (now > duration_ms) break;
    LoopSample s;
    s.t_ms = now;
    s.target = std::clamp(target(now), 0.0, 1.0);
    s.measured = plant.reported_position();
    s.true_position = plant.true_position();
    s.error_measured = s.target - s.measured;
    const auto cmd =
        controller.Step(gripper::NormalizedPosition(s.target), gripper::NormalizedPosition(s.measured), now);
    if (cmd) s.pwm_us = cmd->width_us();
    trace.push_back(s);
    plant.Tick(cmd, dt);
  }
  return trace;
}

std::vector<StepSpec> DefaultStepSequence() { return {{0, 0.0}, {500, 1.0}, {4500, 0.3}, {8500, 0.8}}; }

std::vector<LoopSample> RunStepResponse(const std::vector<StepSpec>& steps, std::int64_t duration_ms,
                                        const LoopOptions& opts) {
  auto target = [&steps](std::int64_t t) {
    double v = 0.0;
    for (const auto& s : steps) {
      if (t >= s.at_ms) v = s.target;
    }
    return v;
  };
  return RunGripperLoop(target, duration_ms, opts);
}

std::vector<StepMetrics> AnalyzeSteps(const std::vector<LoopSample>& trace, const std::vector<StepSpec>& steps,
                                      double band) {
  std::vector<StepMetrics> out;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const std::int64_t begin = steps[i].at_ms;
    const std::int64_t end = i + 1 < steps.size() ? steps[i + 1].at_ms : std::numeric_limits<std::int64_t>::max();
    StepMetrics m;
    m.from = steps[i - 1].target;
    m.to = steps[i].target;
    const double dir = m.to >= m.from ? 1.0 : -1.0;

    std::vector<const LoopSample*> seg;
    for (const auto& s : trace) {
      if (s.t_ms >= begin && s.t_ms < end) seg.push_back(&s);
    }
    if (seg.empty()) {
      out.push_back(m);
      continue;
    }
    std::optional<std::size_t> last_outside;
    for (std::size_t k = 0; k < seg.size(); ++k) {
      const double e = seg[k]->true_position - m.to;
      m.overshoot = std::max(m.overshoot, dir * e);
      if (std::abs(e) > band) last_outside = k;
    }
    const std::size_t settle_idx = last_outside ? *last_outside + 1 : 0;
    if (settle_idx < seg.size()) {
      m.settle_time_s = static_cast<double>(seg[settle_idx]->t_ms - begin) / 1000.0;
      for (std::size_t k = settle_idx; k < seg.size(); ++k) {
        m.post_settle_max_error = std::max(m.post_settle_max_error, std::abs(seg[k]->true_position - m.to));
      }
    }
    out.push_back(m);
  }
  return out;
}

void WriteStepResponseCsv(std::ostream& out, const std::vector<LoopSample>& trace) {
  out << "t_ms,target,measured,true_position,pwm_us\n";
  out << std::fixed << std::setprecision(5);
  for (const auto& s : trace) {
    out << s.t_ms << ',' << s.target << ',' << s.measured << ',' << s.true_position << ',';
    if (s.pwm_us) out << *s.pwm_us;
    out << '\n';
  }
}

}  // namespace subsense::harness
