// Copyright 2026 The sacontrol Authors
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

#include "sac/session.hpp"

#include <atomic>
#include <csignal>
#include <deque>
#include <iostream>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace sac {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct Inbound {
  std::uint64_t client;
  std::string text;
};

// Ordered hand-off from network readers to the simulation task.
class InboundQueue {
 public:
  void push(Inbound m) {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(m));
  }
  std::deque<Inbound> take() {
    std::lock_guard lock(mu_);
    std::deque<Inbound> out;
    out.swap(items_);
    return out;
  }

 private:
  std::mutex mu_;
  std::deque<Inbound> items_;
};

class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket socket, std::uint64_t id, std::size_t capacity, InboundQueue& inbound,
         std::function<void(std::uint64_t)> on_close)
      : ws_(std::move(socket)), id_(id), capacity_(capacity), inbound_(inbound), on_close_(std::move(on_close)) {}

  void start() {
    auto self = shared_from_this();
    http::async_read(ws_.next_layer(), buffer_, request_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->on_request();
    });
  }

  // Called from the simulation task; never blocks on the socket.
  void send(std::string text, bool droppable) {
    auto self = shared_from_this();
    asio::post(ws_.get_executor(), [self, text = std::move(text), droppable]() mutable {
      self->enqueue(std::move(text), droppable);
    });
  }

  std::uint64_t id() const { return id_; }
  bool open() const { return open_.load(); }
  std::uint64_t sent_demo_revision = 0;  // simulation task only

 private:
  void on_request() {
    const std::string target(request_.target());
    if (!websocket::is_upgrade(request_) || target.rfind("/session/", 0) != 0 || target.size() <= 9) {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "websocket endpoint is /session/{id}\n";
      res->prepare_payload();
      auto self = shared_from_this();
      http::async_write(ws_.next_layer(), *res, [self, res](beast::error_code, std::size_t) { self->close(); });
      return;
    }
    auto self = shared_from_this();
    ws_.text(true);
    ws_.async_accept(request_, [self](beast::error_code ec) {
      if (ec) return self->close();
      self->open_ = true;
      self->read();
    });
  }

  void read() {
    auto self = shared_from_this();
    ws_.async_read(read_buf_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->inbound_.push({self->id_, beast::buffers_to_string(self->read_buf_.data())});
      self->read_buf_.consume(self->read_buf_.size());
      self->read();
    });
  }

  void enqueue(std::string text, bool droppable) {
    if (!open_) return;
    if (droppable) {
      if (queued_frames_ >= capacity_) return;
      ++queued_frames_;
    }
    out_.push_back({std::move(text), droppable});
    if (out_.size() == 1) write();
  }

  void write() {
    auto self = shared_from_this();
    ws_.async_write(asio::buffer(out_.front().text), [self](beast::error_code ec, std::size_t) {
      if (self->out_.front().droppable) --self->queued_frames_;
      self->out_.pop_front();
      if (ec) return self->close();
      if (!self->out_.empty()) self->write();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    open_ = false;
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
    on_close_(id_);
  }

  struct Frame {
    std::string text;
    bool droppable;
  };

  websocket::stream<tcp::socket> ws_;
  std::uint64_t id_;
  std::size_t capacity_;
  InboundQueue& inbound_;
  std::function<void(std::uint64_t)> on_close_;
  beast::flat_buffer buffer_;
  beast::flat_buffer read_buf_;
  http::request<http::string_body> request_;
  std::deque<Frame> out_;
  std::size_t queued_frames_ = 0;
  std::atomic<bool> open_{false};
  bool closed_ = false;
};

}  // namespace

struct SessionServer::Impl {
  Impl(ScenarioConfig cfg, SessionOptions o, unsigned short port)
      : opts(std::move(o)), session(std::move(cfg), opts), acceptor(ioc, tcp::endpoint(tcp::v4(), port)) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      const std::uint64_t id = next_client++;
      auto c = std::make_shared<Client>(std::move(socket), id, opts.client_queue, inbound,
                                        [this](std::uint64_t cid) { drop(cid); });
      {
        std::lock_guard lock(clients_mu);
        clients.push_back(c);
      }
      c->start();
      accept();
    });
  }

  void drop(std::uint64_t id) {
    std::lock_guard lock(clients_mu);
    std::erase_if(clients, [id](const std::shared_ptr<Client>& c) { return c->id() == id; });
  }

  std::vector<std::shared_ptr<Client>> snapshot_clients() {
    std::lock_guard lock(clients_mu);
    return clients;
  }

  void broadcast(const std::vector<std::shared_ptr<Client>>& cs) {
    std::optional<std::string> plain;
    std::optional<std::string> with_demo;
    for (const auto& c : cs) {
      if (!c->open()) continue;
      if (c->sent_demo_revision != session.demo_revision()) {
        if (!with_demo) with_demo = session.snapshot(true).dump();
        c->sent_demo_revision = session.demo_revision();
        c->send(*with_demo, false);
      } else {
        if (!plain) plain = session.snapshot(false).dump();
        c->send(*plain, true);
      }
    }
  }

  void loop() {
    using Clock = Session::Clock;
    const auto dt = std::chrono::duration<double>(session.simulation().config().sim.dt);
    const auto snap_period = std::chrono::duration<double>(1.0 / opts.snapshot_hz);
    auto next_step = Clock::now();
    auto next_snap = next_step;
    std::size_t since_snap = 0;
    while (running) {
      const auto now = Clock::now();
      auto cs = snapshot_clients();
      for (auto& m : inbound.take()) {
        const std::string reply = session.handle(m.text, now).dump();
        for (const auto& c : cs) {
          if (c->id() == m.client) c->send(reply, false);
        }
      }
      const bool was_paused = session.paused();
      session.advance(now);
      if (!was_paused) {
        ++steps;
        ++since_snap;
      }
      bool due = false;
      if (opts.real_time || session.paused()) {
        if (now >= next_snap) {
          due = true;
          next_snap += std::chrono::duration_cast<Clock::duration>(snap_period);
          if (next_snap < now) next_snap = now + std::chrono::duration_cast<Clock::duration>(snap_period);
        }
      } else if (since_snap >= opts.snapshot_decimation) {
        due = true;
      }
      if (due) {
        since_snap = 0;
        broadcast(cs);
      }
      if (opts.real_time || session.paused()) {
        next_step += std::chrono::duration_cast<Clock::duration>(dt);
        // After a long stall, resynchronise rather than burst.
        if (Clock::now() - next_step > std::chrono::milliseconds(100)) next_step = Clock::now();
        std::this_thread::sleep_until(next_step);
      }
    }
  }

  SessionOptions opts;
  Session session;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  InboundQueue inbound;
  std::mutex clients_mu;
  std::vector<std::shared_ptr<Client>> clients;
  std::uint64_t next_client = 0;
  std::atomic<bool> running{false};
  std::atomic<std::uint64_t> steps{0};
  std::thread net;
  std::thread sim;
};

SessionServer::SessionServer(ScenarioConfig cfg, SessionOptions opts, unsigned short port)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(opts), port)) {}

SessionServer::~SessionServer() { stop(); }

unsigned short SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

std::uint64_t SessionServer::steps() const { return impl_->steps.load(); }

void SessionServer::start() {
  if (impl_->running.exchange(true)) return;
  impl_->accept();
  impl_->net = std::thread([this] { impl_->ioc.run(); });
  impl_->sim = std::thread([this] { impl_->loop(); });
}

void SessionServer::stop() {
  if (!impl_->running.exchange(false)) return;
  if (impl_->sim.joinable()) impl_->sim.join();
  impl_->ioc.stop();
  if (impl_->net.joinable()) impl_->net.join();
  impl_->session.save_trace();
}

namespace {
std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }
}  // namespace

int serve(const SessionOptions& opts, unsigned short port) {
  ScenarioConfig cfg = load_scenario(opts.scenario);
  SessionServer server(std::move(cfg), opts, port);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.start();
  std::cerr << "serving ws://0.0.0.0:" << server.port() << "/session/{id} (" << (opts.real_time ? "real" : "max")
            << " pace)\n";
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  return 0;
}

}  // namespace sac
