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

#include "subsense/server.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "subsense/protocol.hpp"

namespace subsense::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using udp = asio::ip::udp;

std::uint64_t DecimationFor(double rate_hz, double tick_hz) {
  if (!(rate_hz > 0.0) || rate_hz >= tick_hz) return 1;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(tick_hz / rate_hz)));
}

// -- gateway -----------------------------------------------------------------------

namespace {

class Client : public std::enable_shared_from_this<Client> {
 public:
  using InputSink = std::function<void(gateway::InputMessage)>;
  using CloseSink = std::function<void(const std::shared_ptr<Client>&)>;

  Client(tcp::socket socket, double tick_hz, InputSink on_input, CloseSink on_close)
      : ws_(std::move(socket)), tick_hz_(tick_hz), on_input_(std::move(on_input)), on_close_(std::move(on_close)) {}

  void Start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->Close();
      {
        std::lock_guard lock(self->mu_);
        self->open_ = true;
      }
      self->Read();
    });
  }

  /// Called from the tick thread. Keeps only the newest due snapshot.
  void Offer(std::uint64_t tick, const std::shared_ptr<const std::string>& text) {
    std::lock_guard lock(mu_);
    if (!open_ || closed_ || tick % decimation_ != 0) return;
    latest_ = text;
    if (!kick_pending_) {
      kick_pending_ = true;
      asio::post(ws_.get_executor(), [self = shared_from_this()] { self->Kick(); });
    }
  }

  void Shutdown() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

 private:
  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->Handle(text);
      self->Read();
    });
  }

  void Handle(const std::string& text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(start, end - start);
      start = end + 1;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

      auto parsed = gateway::ParseClientMessage(line);
      if (auto* err = std::get_if<gateway::ParseError>(&parsed)) {
        Reply(gateway::ErrorJson(err->message).dump());
        continue;
      }
      auto& msg = std::get<gateway::ClientMessage>(parsed);
      if (auto* sub = std::get_if<gateway::SubscribeRequest>(&msg)) {
        std::uint64_t n = DecimationFor(sub->rate_hz, tick_hz_);
        {
          std::lock_guard lock(mu_);
          decimation_ = n;
        }
        Reply(nlohmann::json{{"type", "subscribed"}, {"every_n_ticks", n}, {"rate_hz", tick_hz_ / static_cast<double>(n)}}
                  .dump());
      } else {
        on_input_(std::get<gateway::InputMessage>(msg));
      }
    }
  }

  void Reply(std::string text) {
    control_.push_back(std::move(text) + "\n");
    Kick();
  }

  void Kick() {
    std::shared_ptr<const std::string> next;
    {
      std::lock_guard lock(mu_);
      kick_pending_ = false;
      if (writing_ || closed_) return;
      if (control_.empty()) {
        if (!latest_) return;
        next = std::move(latest_);
        latest_.reset();
      }
      writing_ = true;
    }
    if (!next) {
      next = std::make_shared<const std::string>(std::move(control_.front()));
      control_.pop_front();
    }
    in_flight_ = next;
    ws_.async_write(asio::buffer(*in_flight_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      {
        std::lock_guard lock(self->mu_);
        self->writing_ = false;
      }
      self->in_flight_.reset();
      if (ec) return self->Close();
      self->Kick();
    });
  }

  void Close() {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      closed_ = true;
      latest_.reset();
    }
    on_close_(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  const double tick_hz_;
  InputSink on_input_;
  CloseSink on_close_;

  // I/O thread only.
  std::deque<std::string> control_;
  std::shared_ptr<const std::string> in_flight_;

  // Shared with the tick thread.
  std::mutex mu_;
  std::uint64_t decimation_ = 1;
  std::shared_ptr<const std::string> latest_;
  bool kick_pending_ = false;
  bool writing_ = false;
  bool open_ = false;  // handshake done
  bool closed_ = false;
};

}  // namespace

struct Gateway::Impl {
  Impl(Scenario s, GatewayOptions o) : scenario(std::move(s)), options(std::move(o)), acceptor(ioc) {}

  Scenario scenario;
  GatewayOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::thread io_thread;
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> served{0};

  std::mutex input_mu;
  std::vector<gateway::InputMessage> inputs;

  mutable std::mutex clients_mu;
  std::set<std::shared_ptr<Client>> clients;

  void Accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto client = std::make_shared<Client>(
          std::move(socket), scenario.tick_hz,
          [this](gateway::InputMessage m) {
            std::lock_guard lock(input_mu);
            inputs.push_back(std::move(m));
          },
          [this](const std::shared_ptr<Client>& c) {
            std::lock_guard lock(clients_mu);
            clients.erase(c);
          });
      {
        std::lock_guard lock(clients_mu);
        clients.insert(client);
      }
      ++served;
      client->Start();
      Accept();
    });
  }

  void Broadcast(std::uint64_t tick, const std::shared_ptr<const std::string>& text) {
    std::vector<std::shared_ptr<Client>> targets;
    {
      std::lock_guard lock(clients_mu);
      targets.assign(clients.begin(), clients.end());
    }
    for (const auto& c : targets) c->Offer(tick, text);
  }

  void Shutdown() {
    if (!io_thread.joinable()) return;
    asio::post(ioc, [this] {
      beast::error_code ec;
      acceptor.close(ec);
      std::lock_guard lock(clients_mu);
      for (const auto& c : clients) c->Shutdown();
    });
    // Give pending closes a moment, then stop the loop regardless.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ioc.stop();
    io_thread.join();
  }
};

Gateway::Gateway(Scenario scenario, GatewayOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {
  impl_->scenario.Validate();
}

Gateway::~Gateway() { impl_->Shutdown(); }

void Gateway::Start() {
  auto& im = *impl_;
  const tcp::endpoint ep(asio::ip::make_address(im.options.bind_address), im.options.port);
  im.acceptor.open(ep.protocol());
  im.acceptor.set_option(asio::socket_base::reuse_address(true));
  im.acceptor.bind(ep);
  im.acceptor.listen();
  im.Accept();
  im.io_thread = std::thread([&im] { im.ioc.run(); });
}

std::uint16_t Gateway::port() const { return impl_->acceptor.local_endpoint().port(); }

std::size_t Gateway::client_count() const {
  std::lock_guard lock(impl_->clients_mu);
  return impl_->clients.size();
}

void Gateway::Stop() { impl_->stop = true; }

GatewayResult Gateway::Run() {
  auto& im = *impl_;
  const Scenario& sc = im.scenario;
  gateway::Session session(sc);
  const double limit_s = im.options.limit_s > 0.0 ? im.options.limit_s : sc.session_limit_s;
  const auto max_ticks = static_cast<std::uint64_t>(std::llround(limit_s * sc.tick_hz));

  std::optional<harness::EventLogWriter> log;
  if (im.options.record) {
    log.emplace(*im.options.record);
    log->WriteHeader(sc, limit_s, im.options.operator_name);
  }

  using Clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(sc.tick_ms()));
  auto next = Clock::now();

  std::vector<gateway::InputMessage> batch;
  while (!im.stop && session.tick_index() < max_ticks) {
    const std::uint64_t tick = session.tick_index();
    const std::int64_t t_ms = session.now_ms();
    batch.clear();
    {
      std::lock_guard lock(im.input_mu);
      batch.swap(im.inputs);
    }
    const auto& snap = session.Tick(batch);
    if (log) log->WriteTick(t_ms, tick, batch, snap.events);
    im.Broadcast(snap.tick, std::make_shared<const std::string>(gateway::SnapshotToJson(snap).dump() + "\n"));
    ticks_ = session.tick_index();
    if (im.options.stop_on_complete && snap.metrics.completed) break;

    if (im.options.realtime) {
      next += period;
      const auto now = Clock::now();
      if (now - next > std::chrono::seconds(1)) next = now;  // resync after a long stall
      std::this_thread::sleep_until(next);
    }
  }

  GatewayResult r;
  r.metrics = session.Metrics();
  r.ticks = session.tick_index();
  r.clients_served = im.served;
  if (log) log->WriteSummary(r.metrics, session.tracker().moves(), r.ticks);
  return r;
}

// -- UDP bridge --------------------------------------------------------------------

struct UdpBridge::Impl {
  Impl(UdpBridgeOptions o, std::function<void(const wire::BridgeStats&)> cb)
      : options(std::move(o)), on_stats(std::move(cb)), socket(ioc), out(ioc), timer(ioc) {}

  UdpBridgeOptions options;
  std::function<void(const wire::BridgeStats&)> on_stats;
  asio::io_context ioc;
  udp::socket socket;
  udp::socket out;
  udp::endpoint forward;
  udp::endpoint sender;
  asio::steady_timer timer;
  std::array<std::uint8_t, 2048> buf{};
  std::atomic<bool> stop{false};

  mutable std::mutex mu;
  wire::Bridge bridge;

  void Receive() {
    socket.async_receive_from(asio::buffer(buf), sender, [this](boost::system::error_code ec, std::size_t n) {
      if (ec == asio::error::operation_aborted) return;
      if (!ec) {
        std::optional<wire::Bytes> frame;
        {
          std::lock_guard lock(mu);
          frame = bridge.Forward(wire::ByteView(buf.data(), n), bridge.Now());
        }
        if (frame) {
          boost::system::error_code send_ec;
          out.send_to(asio::buffer(*frame), forward, 0, send_ec);
        }
      }
      Receive();
    });
  }

  void ArmTimer() {
    timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(options.stats_interval_s)));
    timer.async_wait([this](boost::system::error_code ec) {
      if (ec) return;
      wire::BridgeStats snapshot;
      {
        std::lock_guard lock(mu);
        snapshot = bridge.stats();
        bridge.ResetStats();
      }
      if (on_stats) on_stats(snapshot);
      ArmTimer();
    });
  }
};

UdpBridge::UdpBridge(UdpBridgeOptions options, std::function<void(const wire::BridgeStats&)> on_stats)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(on_stats))) {}

UdpBridge::~UdpBridge() = default;

void UdpBridge::Start() {
  auto& im = *impl_;
  const udp::endpoint listen(asio::ip::make_address(im.options.listen_address), im.options.listen_port);
  im.socket.open(listen.protocol());
  im.socket.bind(listen);
  im.forward = udp::endpoint(asio::ip::make_address(im.options.forward_address), im.options.forward_port);
  im.out.open(im.forward.protocol());
  im.Receive();
  if (im.options.stats_interval_s > 0.0) im.ArmTimer();
}

void UdpBridge::Run() {
  while (!impl_->stop) {
    impl_->ioc.run_for(std::chrono::milliseconds(100));
    if (impl_->ioc.stopped()) impl_->ioc.restart();
  }
}

void UdpBridge::Stop() { impl_->stop = true; }

std::uint16_t UdpBridge::listen_port() const { return impl_->socket.local_endpoint().port(); }

wire::BridgeStats UdpBridge::stats() const {
  std::lock_guard lock(impl_->mu);
  return impl_->bridge.stats();
}

}  // namespace subsense::net
