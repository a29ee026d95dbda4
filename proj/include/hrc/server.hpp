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


#ifndef HRC_SERVER_HPP_
#define HRC_SERVER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "hrc/stream.hpp"

namespace hrc {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double tick_rate = 30.0;     // Hz of wall clock, one simulated tick each
  std::size_t client_queue = 8;  // pending messages per client
  std::size_t send_buffer = 64 * 1024;  // kernel send buffer per client, 0 = OS default
};

struct ServerStats {
  std::uint64_t ticks = 0;
  std::uint64_t clients = 0;   // currently connected
  std::uint64_t dropped = 0;   // messages discarded by full client queues
  std::uint64_t rejected = 0;  // control messages that failed to parse or apply
};

// WebSocket endpoint streaming one session. Snapshots go to every client at
// the tick rate; a client that cannot keep up loses its oldest queued
// messages and never delays the simulation.
class StreamServer {
 public:
  StreamServer(Scenario scenario, std::optional<MLPParams> model,
               ServerOptions options);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  // Binds and starts the network and simulation threads.
  void start();
  void stop();
  unsigned short port() const;
  ServerStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hrc

#endif  // HRC_SERVER_HPP_
