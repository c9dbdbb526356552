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

// subsense: command-line front end for sessions, replays, reports, the
// step-response bench, the gateway server and the UDP bridge.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "subsense/harness.hpp"
#include "subsense/protocol.hpp"
#include "subsense/server.hpp"

namespace {

using namespace subsense;

std::atomic<bool> g_interrupted{false};

extern "C" void OnSignal(int) { g_interrupted = true; }

void InstallSignalHandlers() {
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
}

Scenario LoadScenarioOrDefault(const std::string& path, std::optional<std::uint64_t> seed) {
  Scenario s = path.empty() ? Scenario{} : LoadScenario(path);
  if (seed) s.plant.seed = *seed;
  s.Validate();
  return s;
}

void PrintMetrics(const harness::TaskMetrics& m, std::ostream& out) {
  out << gateway::MetricsToJson(m).dump() << "\n";
}

std::vector<harness::TimedInput> LoadScript(const std::string& path) {
  // Either a recorded event log or a bare list of {"tick", "message"} lines.
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script " + path);
  std::vector<harness::TimedInput> script;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.contains("kind")) return harness::ReadEventLog(path).inputs;
    script.push_back({j.at("tick").get<std::uint64_t>(), gateway::InputFromJson(j.at("message"))});
  }
  return script;
}

int RunGateway(const Scenario& sc, net::GatewayOptions opts) {
  InstallSignalHandlers();
  net::Gateway gw(sc, opts);
  gw.Start();
  std::cerr << "gateway listening on ws://" << opts.bind_address << ":" << gw.port() << " ("
            << (opts.realtime ? "realtime" : "headless") << ", " << sc.tick_hz << " Hz)\n";
  std::thread watcher([&gw] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    gw.Stop();
  });
  const auto r = gw.Run();
  g_interrupted = true;
  watcher.join();
  std::cerr << "stopped after " << r.ticks << " ticks, " << r.clients_served << " client(s) served\n";
  PrintMetrics(r.metrics, std::cout);
  return 0;
}

std::pair<std::string, std::uint16_t> SplitHostPort(const std::string& s, const std::string& default_host) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) return {default_host, static_cast<std::uint16_t>(std::stoi(s))};
  const std::string host = colon == 0 ? default_host : s.substr(0, colon);
  return {host, static_cast<std::uint16_t>(std::stoi(s.substr(colon + 1)))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SubSense ROV teleoperation stack"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one session with a scripted or live operator");
  std::string run_scenario, run_operator = "script", run_script, run_record, run_bind = "127.0.0.1:8765";
  std::optional<std::uint64_t> run_seed;
  std::optional<double> run_limit;
  run->add_option("--scenario", run_scenario, "Scenario JSON file (defaults built in)");
  run->add_option("--seed", run_seed, "Override the scenario RNG seed");
  run->add_option("--limit-s", run_limit, "Session time limit in seconds");
  run->add_option("--operator", run_operator, "script: built-in optimal operator or --script file; live: gateway")
      ->check(CLI::IsMember({"script", "live"}));
  run->add_option("--script", run_script, "Input script (event log or {tick, message} lines)");
  run->add_option("--record", run_record, "Write the event log here");
  run->add_option("--bind", run_bind, "Gateway address for --operator live");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a recorded event log and compare metrics");
  std::string replay_log;
  replay->add_option("--log", replay_log, "Event log")->required()->check(CLI::ExistingFile);

  // report
  auto* report = app.add_subcommand("report", "Aggregate metrics over a directory of event logs");
  std::string report_dir;
  bool report_json = false;
  report->add_option("--logs", report_dir, "Directory of *.jsonl logs")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--json", report_json, "Machine-readable output");

  // bench-step-response
  auto* bench = app.add_subcommand("bench-step-response", "Gripper step response as CSV");
  std::string bench_out, bench_scenario;
  std::uint64_t bench_seed = 1;
  double bench_band = 0.05;
  bench->add_option("--out", bench_out, "CSV path (default stdout)");
  bench->add_option("--scenario", bench_scenario, "Scenario JSON for gripper and controller constants");
  bench->add_option("--seed", bench_seed, "Noise seed");
  bench->add_option("--band", bench_band, "Settling band for the summary");

  // serve
  auto* serve = app.add_subcommand("serve", "WebSocket gateway for operator consoles");
  std::string serve_bind = "127.0.0.1:8765", serve_scenario, serve_record;
  std::optional<double> serve_tick_hz, serve_limit;
  std::optional<std::uint64_t> serve_seed;
  bool serve_realtime = true;
  serve->add_option("--bind", serve_bind, "host:port");
  serve->add_option("--tick-hz", serve_tick_hz, "Tick rate");
  serve->add_option("--scenario", serve_scenario, "Scenario JSON file");
  serve->add_option("--seed", serve_seed, "Override the scenario RNG seed");
  serve->add_option("--limit-s", serve_limit, "Stop after this much session time");
  serve->add_flag("--realtime,!--headless", serve_realtime, "Pace ticks to wall time (default) or run flat out");
  serve->add_option("--record", serve_record, "Write the event log here");

  // bridge
  auto* bridge = app.add_subcommand("bridge", "Validate and forward sensor/command frames over UDP");
  std::string bridge_listen = "0.0.0.0:14550", bridge_forward = "127.0.0.1:14551";
  double bridge_interval = 5.0;
  bridge->add_option("--listen", bridge_listen, "host:port to receive on");
  bridge->add_option("--forward", bridge_forward, "host:port to forward to");
  bridge->add_option("--stats-interval", bridge_interval, "Seconds between stats lines (0 = off)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Scenario sc = LoadScenarioOrDefault(run_scenario, run_seed);
      const double limit = run_limit.value_or(sc.session_limit_s);
      std::ofstream rec;
      std::optional<harness::EventLogWriter> writer;
      if (!run_record.empty()) {
        rec.open(run_record);
        if (!rec) throw std::runtime_error("cannot write " + run_record);
        writer.emplace(rec);
      }
      if (run_operator == "live") {
        net::GatewayOptions o;
        std::tie(o.bind_address, o.port) = SplitHostPort(run_bind, "127.0.0.1");
        o.limit_s = limit;
        o.stop_on_complete = true;
        if (!run_record.empty()) o.record = &rec;
        return RunGateway(sc, o);
      }
      std::unique_ptr<harness::Operator> op;
      if (run_script.empty()) {
        op = std::make_unique<harness::AutopilotOperator>(sc);
      } else {
        op = std::make_unique<harness::ScriptedOperator>(LoadScript(run_script));
      }
      const auto r = harness::RunSession(sc, *op, limit, writer ? &*writer : nullptr);
      PrintMetrics(r.metrics, std::cout);
      if (!r.metrics.completed && op->Exhausted() && !run_script.empty()) {
        std::cerr << "operator script ended before the task was completed\n";
      }
      return 0;
    }

    if (*replay) {
      const auto log = harness::ReadEventLog(replay_log);
      const auto rr = harness::Replay(log);
      PrintMetrics(rr.result.metrics, std::cout);
      if (!rr.recorded) {
        std::cerr << "log has no summary; nothing to compare\n";
        return 0;
      }
      std::cerr << (rr.matches ? "replay matches recorded metrics\n" : "replay DIFFERS from recorded metrics\n");
      return rr.matches ? 0 : 1;
    }

    if (*report) {
      std::vector<harness::TaskMetrics> all;
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(report_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        const auto log = harness::ReadEventLog(f);
        if (!log.summary) {
          std::cerr << "skipping " << f.string() << ": no summary\n";
          continue;
        }
        all.push_back(*log.summary);
      }
      const auto rep = harness::Report(all);
      if (report_json) {
        std::cout << rep.ToJson().dump(2) << "\n";
      } else {
        std::cout << rep.ToText();
      }
      return 0;
    }

    if (*bench) {
      const Scenario sc = LoadScenarioOrDefault(bench_scenario, std::nullopt);
      harness::LoopOptions o;
      o.controller = sc.controller;
      o.gripper = sc.plant.gripper;
      o.tick_hz = sc.tick_hz;
      o.seed = bench_seed;
      const auto steps = harness::DefaultStepSequence();
      const std::int64_t duration = steps.back().at_ms + 4000;
      const auto trace = harness::RunStepResponse(steps, duration, o);
      if (bench_out.empty()) {
        harness::WriteStepResponseCsv(std::cout, trace);
      } else {
        std::ofstream f(bench_out);
        if (!f) throw std::runtime_error("cannot write " + bench_out);
        harness::WriteStepResponseCsv(f, trace);
      }
      for (const auto& m : harness::AnalyzeSteps(trace, steps, bench_band)) {
        std::cerr << std::fixed << std::setprecision(3) << "step " << m.from << " -> " << m.to << ": settle ";
        if (m.settle_time_s) {
          std::cerr << *m.settle_time_s << " s";
        } else {
          std::cerr << "never";
        }
        std::cerr << ", overshoot " << m.overshoot << ", post-settle max error " << m.post_settle_max_error << "\n";
      }
      return 0;
    }

    if (*serve) {
      Scenario sc = LoadScenarioOrDefault(serve_scenario, serve_seed);
      if (serve_tick_hz) sc.tick_hz = *serve_tick_hz;
      sc.Validate();
      net::GatewayOptions o;
      std::tie(o.bind_address, o.port) = SplitHostPort(serve_bind, "127.0.0.1");
      o.realtime = serve_realtime;
      o.limit_s = serve_limit.value_or(0.0);
      std::ofstream rec;
      if (!serve_record.empty()) {
        rec.open(serve_record);
        if (!rec) throw std::runtime_error("cannot write " + serve_record);
        o.record = &rec;
      }
      return RunGateway(sc, o);
    }

    if (*bridge) {
      InstallSignalHandlers();
      net::UdpBridgeOptions o;
      std::tie(o.listen_address, o.listen_port) = SplitHostPort(bridge_listen, "0.0.0.0");
      std::tie(o.forward_address, o.forward_port) = SplitHostPort(bridge_forward, "127.0.0.1");
      o.stats_interval_s = bridge_interval;
      net::UdpBridge b(o, [](const wire::BridgeStats& s) {
        std::cout << nlohmann::json{{"forwarded", s.frames_forwarded},
                                    {"dropped", s.frames_dropped_crc},
                                    {"mean_latency_ms", s.MeanLatencyMs()},
                                    {"max_latency_ms", s.MaxLatencyMs()}}
                         .dump()
                  << std::endl;
      });
      b.Start();
      std::cerr << "bridge " << bridge_listen << " -> " << bridge_forward << "\n";
      std::thread watcher([&b] {
        while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        b.Stop();
      });
      b.Run();
      watcher.join();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
