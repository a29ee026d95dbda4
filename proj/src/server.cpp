// Copyright 2026 The HRC Co-Assembly Authors
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


#include "hrc/server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace hrc {
namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Message = std::shared_ptr<const std::string>;

class Hub;

class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket socket, Hub& hub, std::size_t capacity)
      : ws_(std::move(socket)), hub_(hub), capacity_(capacity) {}

  void open();
  // Thread safe. Drops the oldest pending message when the queue is full.
  void push(Message m);
  void close();

 private:
  void on_accept(beast::error_code ec);
  void read();
  void on_read(beast::error_code ec, std::size_t);
  void write();
  void on_write(beast::error_code ec, std::size_t);
  void fail();

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  std::size_t capacity_;
  beast::flat_buffer in_;
  std::mutex mutex_;
  std::deque<Message> pending_;
  Message current_;
  bool writing_ = false;
  bool open_ = false;
  bool gone_ = false;
};

// Shared state between the network thread and the simulation thread.
class Hub {
 public:
  Hub(Session& session, std::size_t capacity)
      : session_(session), capacity_(capacity) {}

  void add(const std::shared_ptr<Client>& c) {
    std::lock_guard<std::mutex> lock(mutex_);
    clients_.insert(c);
  }
  void remove(const std::shared_ptr<Client>& c) {
    std::lock_guard<std::mutex> lock(mutex_);
    clients_.erase(c);
  }
  void broadcast(const Message& m) {
    std::vector<std::shared_ptr<Client>> targets;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      targets.assign(clients_.begin(), clients_.end());
    }
    for (const auto& c : targets) c->push(m);
  }
  void close_all() {
    std::set<std::shared_ptr<Client>> all;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      all.swap(clients_);
    }
    for (const auto& c : all) c->close();
  }
  std::size_t count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return clients_.size();
  }

  Session& session_;
  std::size_t capacity_;
  std::atomic<std::uint64_t> dropped{0};
  std::atomic<std::uint64_t> rejected{0};

 private:
  mutable std::mutex mutex_;
  std::set<std::shared_ptr<Client>> clients_;
};

void Client::open() {
  ws_.set_option(
      websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(beast::bind_front_handler(&Client::on_accept,
                                             shared_from_this()));
}

void Client::on_accept(beast::error_code ec) {
  if (ec) return;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    open_ = true;
  }
  hub_.add(shared_from_this());
  read();
}

void Client::read() {
  ws_.async_read(in_, beast::bind_front_handler(&Client::on_read,
                                                shared_from_this()));
}

void Client::on_read(beast::error_code ec, std::size_t) {
  if (ec) return fail();
  const std::string text = beast::buffers_to_string(in_.data());
  in_.consume(in_.size());
  try {
    hub_.session_.post(control_from_json(text));
  } catch (const Error& e) {
    ++hub_.rejected;
    push(std::make_shared<const std::string>(error_to_json(e.what())));
  }
  read();
}

void Client::push(Message m) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!open_ || gone_) return;
  if (pending_.size() >= capacity_) {
    pending_.pop_front();
    ++hub_.dropped;
  }
  pending_.push_back(std::move(m));
  if (!writing_) {
    writing_ = true;
    net::post(ws_.get_executor(),
              beast::bind_front_handler(&Client::write, shared_from_this()));
  }
}

void Client::write() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (pending_.empty() || gone_) {
      writing_ = false;
      return;
    }
    current_ = std::move(pending_.front());
    pending_.pop_front();
  }
  ws_.text(true);
  ws_.async_write(net::buffer(*current_),
                  beast::bind_front_handler(&Client::on_write,
                                            shared_from_this()));
}

void Client::on_write(beast::error_code ec, std::size_t) {
  if (ec) return fail();
  write();
}

void Client::fail() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (gone_) return;
    gone_ = true;
    pending_.clear();
  }
  hub_.remove(shared_from_this());
  beast::error_code ignored;
  beast::get_lowest_layer(ws_).socket().close(ignored);
}

void Client::close() {
  net::post(ws_.get_executor(), [self = shared_from_this()] { self->fail(); });
}

}  // namespace

struct StreamServer::Impl {
  Impl(Scenario scenario, std::optional<MLPParams> model, ServerOptions opts)
      : options(std::move(opts)),
        session(std::move(scenario), std::move(model)),
        hub(session, std::max<std::size_t>(1, options.client_queue)),
        acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(
        net::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
          if (ec) return;
          if (options.send_buffer > 0) {
            beast::error_code ignored;
            s.set_option(net::socket_base::send_buffer_size(
                             static_cast<int>(options.send_buffer)),
                         ignored);
          }
          std::make_shared<Client>(std::move(s), hub, hub.capacity_)->open();
          accept();
        });
  }

  void simulate() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / options.tick_rate));
    auto next = clock::now();
    while (running) {
      const Snapshot snap = session.advance();
      for (const auto& e : session.drain_errors()) {
        ++hub.rejected;
        hub.broadcast(std::make_shared<const std::string>(error_to_json(e)));
      }
      hub.broadcast(std::make_shared<const std::string>(snapshot_to_json(snap)));
      ++ticks;
      next += period;
      const auto now = clock::now();
      // Falling behind by more than a tick restarts the schedule.
      if (now > next + period) next = now;
      std::this_thread::sleep_until(next);
    }
  }

  ServerOptions options;
  Session session;
  Hub hub;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread net_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};
  std::atomic<std::uint64_t> ticks{0};
  unsigned short bound_port = 0;
};

StreamServer::StreamServer(Scenario scenario, std::optional<MLPParams> model,
                           ServerOptions options) {
  if (!(options.tick_rate > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "tick rate must be positive");
  impl_ = std::make_unique<Impl>(std::move(scenario), std::move(model),
                                 std::move(options));
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  if (impl_->running) return;
  Impl& m = *impl_;
  try {
    const tcp::endpoint ep(net::ip::make_address(m.options.address),
                           m.options.port);
    m.acceptor.open(ep.protocol());
    m.acceptor.set_option(net::socket_base::reuse_address(true));
    m.acceptor.bind(ep);
    m.acceptor.listen();
    m.bound_port = m.acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kIo, std::string("cannot listen on ") +
                                    m.options.address + ":" +
                                    std::to_string(m.options.port) + ": " +
                                    e.what());
  }
  m.running = true;
  m.accept();
  m.net_thread = std::thread([&m] { m.ioc.run(); });
  m.sim_thread = std::thread([&m] { m.simulate(); });
}

void StreamServer::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  Impl& m = *impl_;
  m.sim_thread.join();
  net::post(m.ioc, [&m] {
    beast::error_code ignored;
    m.acceptor.close(ignored);
  });
  m.hub.close_all();
  // Let the closes run, then stop the loop.
  net::post(m.ioc, [&m] { m.ioc.stop(); });
  m.net_thread.join();
}

unsigned short StreamServer::port() const { return impl_->bound_port; }

ServerStats StreamServer::stats() const {
  return {impl_->ticks.load(), impl_->hub.count(), impl_->hub.dropped.load(),
          impl_->hub.rejected.load()};
}

}  // namespace hrc
