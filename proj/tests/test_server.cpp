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


#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include "json.hpp"
#include <thread>

#include "doctest.h"
#include "hrc/server.hpp"

using namespace hrc;
namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

const MLPParams& shipped_model() {
  static const MLPParams m = load_model_file(HRC_TEST_MODEL);
  return m;
}

struct Fixture {
  explicit Fixture(double rate = 30.0, std::size_t queue = 8) {
    ServerOptions o;
    o.port = 0;
    o.tick_rate = rate;
    o.client_queue = queue;
    server = std::make_unique<StreamServer>(default_scenario(), shipped_model(), o);
    server->start();
  }
  ~Fixture() { server->stop(); }
  std::unique_ptr<StreamServer> server;
};

class Client {
 public:
  explicit Client(unsigned short port, int receive_buffer = 0) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    auto& sock = beast::get_lowest_layer(ws_);
    sock.open(tcp::v4());
    if (receive_buffer > 0)
      sock.set_option(net::socket_base::receive_buffer_size(receive_buffer));
    sock.connect(*resolver.resolve("127.0.0.1", std::to_string(port)).begin());
    ws_.handshake("127.0.0.1", "/");
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(beast::websocket::close_code::normal, ec);
  }
  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  json read_snapshot() {
    for (;;) {
      json j = read();
      if (j["type"] == "snapshot") return j;
    }
  }
  void send(const std::string& text) { ws_.write(net::buffer(text)); }

 private:
  net::io_context ioc_;
  beast::websocket::stream<tcp::socket> ws_;
};

std::string msg(const std::string& type, json extra = json::object()) {
  extra["schema"] = kStreamSchema;
  extra["type"] = type;
  return extra.dump();
}

}  // namespace

TEST_SUITE("server") {

TEST_CASE("snapshots arrive at the tick rate with consecutive ticks") {
  Fixture f;
  Client c(f.server->port());
  json first = c.read_snapshot();
  const auto start = Clock::now();
  long last = first["tick"];
  int count = 0, gaps = 0;
  while (Clock::now() - start < std::chrono::seconds(2)) {
    const json j = c.read_snapshot();
    const long t = j["tick"];
    CHECK(t > last);
    gaps += t != last + 1;
    last = t;
    ++count;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const double rate = count / secs;
  CHECK(rate >= 27.0);
  CHECK(rate <= 33.0);
  CHECK(gaps == 0);
  CHECK(f.server->stats().clients == 1);
}

TEST_CASE("a wrist target is reflected in later snapshots") {
  Fixture f;
  Client c(f.server->port());
  c.read_snapshot();
  c.send(msg("wrist_target", {{"target", {0.75, 0.1, 0.25}}}));
  bool seen = false;
  for (int k = 0; k < 30 && !seen; ++k) seen = c.read_snapshot()["human"]["wrist_override"];
  CHECK(seen);
  c.send(msg("release"));
  bool released = false;
  for (int k = 0; k < 30 && !released; ++k)
    released = !c.read_snapshot()["human"]["wrist_override"].get<bool>();
  CHECK(released);
}

TEST_CASE("reset restarts the tick counter") {
  Fixture f;
  Client c(f.server->port());
  long t = 0;
  while (t < 20) t = c.read_snapshot()["tick"];
  c.send(msg("reset"));
  long low = t;
  for (int k = 0; k < 30; ++k) low = std::min<long>(low, c.read_snapshot()["tick"]);
  CHECK(low <= 1);
}

TEST_CASE("bad messages get an error reply and are counted") {
  Fixture f;
  Client c(f.server->port());
  c.read_snapshot();
  c.send("{ not json");
  bool got = false;
  for (int k = 0; k < 30 && !got; ++k) {
    const json j = c.read();
    if (j["type"] == "error") {
      got = true;
      CHECK_FALSE(j["message"].get<std::string>().empty());
    }
  }
  CHECK(got);
  CHECK(f.server->stats().rejected >= 1);
  c.send(msg("human_model", {{"index", 42}}));
  got = false;
  for (int k = 0; k < 30 && !got; ++k) got = c.read()["type"] == "error";
  CHECK(got);
}

TEST_CASE("a stalled client loses messages without slowing the loop") {
  Fixture f(30.0, 4);
  Client stalled(f.server->port(), 4096);
  Client live(f.server->port());
  live.read_snapshot();
  const auto t0 = f.server->stats().ticks;
  const auto start = Clock::now();
  int count = 0;
  while (Clock::now() - start < std::chrono::seconds(6)) {
    live.read_snapshot();
    ++count;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const double ticks = static_cast<double>(f.server->stats().ticks - t0);
  CHECK(ticks / secs >= 27.0);
  CHECK(count / secs >= 27.0);
  CHECK(f.server->stats().dropped > 0);
}

TEST_CASE("binding a taken port fails with an I/O error") {
  Fixture f;
  ServerOptions o;
  o.port = f.server->port();
  StreamServer second(default_scenario(), shipped_model(), o);
  try {
    second.start();
    FAIL("second bind succeeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

}  // TEST_SUITE
