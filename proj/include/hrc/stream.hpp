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


#ifndef HRC_STREAM_HPP_
#define HRC_STREAM_HPP_

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hrc/sim.hpp"

namespace hrc {

inline constexpr const char* kStreamSchema = "hrc.stream/1";

struct CapsuleView {
  std::string label;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;
  bool avoid = false;

  bool operator==(const CapsuleView&) const = default;
};

// Everything a client needs to draw one tick; no kinematics required.
struct Snapshot {
  long tick = 0;
  double time = 0.0;
  std::vector<double> q;
  std::vector<double> qdot;
  std::vector<CapsuleView> robot;
  std::vector<CapsuleView> human;
  Vec3 right_wrist = Vec3::Zero();
  std::vector<Vec3> blocks;
  std::vector<bool> inserted;
  Vec3 container_position = Vec3::Zero();
  Quat container_orientation = Quat::Identity();
  int displayed_surface = 0;  // surface facing the worker, 0 = none
  double distance = kNoAvoidDistance;
  double distance_rate = 0.0;
  double d_min = 0.0;
  double phi = kNoHazardPhi;
  std::optional<std::string> intention;
  double confidence = 0.0;
  std::string ground_truth;
  int task_node = 0;
  std::vector<int> completed;
  int active_surface = 0;
  std::string goal_kind;
  int goal_surface = 0;
  bool goal_reached = false;
  bool safety_triggered = false;
  bool emergency = false;
  bool alert = false;
  bool safety_enabled = true;
  bool wrist_override = false;
  bool finished = false;
  std::string mode;
  std::string human_model;
  std::string human_phase;

  bool operator==(const Snapshot& other) const;
};

Snapshot make_snapshot(const Simulation& sim);

// Non-finite phi is written as null and read back as "no hazard".
std::string snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const std::string& text);

enum class ControlType { kWristTarget, kRelease, kMode, kSafety, kReset,
                         kHumanModel };

const char* control_type_name(ControlType t);

struct ControlMessage {
  ControlType type = ControlType::kReset;
  Vec3 target = Vec3::Zero();  // kWristTarget
  Mode mode = Mode::kProactive;  // kMode
  bool safety = true;            // kSafety
  int human_model = 0;           // kHumanModel, index into the scenario

  bool operator==(const ControlMessage&) const = default;
};

std::string control_to_json(const ControlMessage& m);
// Throws kParse on malformed input or a schema mismatch.
ControlMessage control_from_json(const std::string& text);

std::string error_to_json(const std::string& message);

// One simulation timeline. Messages may be posted from any thread; they are
// applied in order at the next tick boundary.
class Session {
 public:
  Session(Scenario scenario, std::optional<MLPParams> model);

  void post(const ControlMessage& message);
  // Applies queued messages, advances one tick, returns the new state.
  Snapshot advance();
  Snapshot snapshot() const;
  const Simulation& simulation() const { return *sim_; }

  // Rejected messages since the last call, in order.
  std::vector<std::string> drain_errors();

  // Applies one message immediately; throws on a rejected message.
  void apply(const ControlMessage& message);

 private:
  void restart();

  Scenario base_;
  std::optional<MLPParams> model_;
  std::unique_ptr<Simulation> sim_;
  std::mutex inbox_mutex_;
  std::deque<ControlMessage> inbox_;
  std::vector<std::string> errors_;
};

}  // namespace hrc

#endif  // HRC_STREAM_HPP_
