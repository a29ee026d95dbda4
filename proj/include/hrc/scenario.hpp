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

#ifndef HRC_SCENARIO_HPP_
#define HRC_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hrc/geometry.hpp"
#include "hrc/planner.hpp"
#include "hrc/policy.hpp"
#include "hrc/safe_control.hpp"
#include "hrc/task_graph.hpp"

namespace hrc {

enum class Mode { kBaseline, kProactive };
enum class Posture { kConservative, kProactive };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& name);
const char* posture_name(Posture p);
Posture parse_posture(const std::string& name);

// Body dimensions of the simulated worker. The worker stands at
// `torso_position` facing -x; lengths in meters.
struct HumanBody {
  Vec3 torso_position = Vec3(1.15, 0.0, 0.0);  // base of the torso
  double torso_height = 0.40;
  double torso_radius = 0.14;
  double pelvis_half_width = 0.10;
  double pelvis_radius = 0.12;
  double neck_length = 0.08;
  double neck_radius = 0.05;
  double head_length = 0.08;
  double head_radius = 0.10;
  double shoulder_half_width = 0.20;
  double upper_arm = 0.32;
  double forearm = 0.30;
  double hand = 0.08;
  double arm_radius = 0.045;
  double hand_radius = 0.04;
  Vec3 right_rest = Vec3(0.92, 0.22, 0.06);  // wrist
  Vec3 left_rest = Vec3(0.95, -0.26, 0.06);
  Vec3 lean_offset = Vec3(-0.16, 0.0, -0.04);  // full lean of the shoulders
  double lean_distance = 0.25;  // wrist-to-container distance of full lean
};

struct HumanModel {
  std::string name;
  std::vector<int> surface_order;                // permutation of 1..S
  std::vector<std::vector<int>> block_order;     // per surface, block ids
  double reach_speed = 0.8;      // m/s
  double reach_acceleration = 2.5;  // m/s^2
  double think_duration = 0.4;   // s
  double grab_duration = 0.45;   // s
  double insert_duration = 2.0;  // s
  double noise_sigma = 0.02;     // m
  Posture posture = Posture::kConservative;
  double command_latency = 1.0;  // s, baseline mode

  void validate(const TaskGraph& graph) const;
};

// Five workers with distinct preferences, speeds and postures.
std::vector<HumanModel> default_human_models(const TaskGraph& graph);

// Container held below the tool.
struct ContainerSpec {
  double drop = 0.10;        // tool to container center, along the tool axis
  double half_size = 0.06;
  Vec3 insertion_offset = Vec3(0.18, 0.0, 0.0);  // from the center, world
  Vec3 staging_offset = Vec3(0.10, 0.04, 0.02);  // from the insertion point
};

struct HazardParams {
  double incursion_speed = 1.0;   // m/s
  double incursion_start = 1.0;   // s
  double incursion_dwell = 1.5;   // s
  double duration = 8.0;          // s per scripted hazard
};

struct Scenario {
  ArmModel arm;
  SafetySpec safety_spec;
  TaskGraph graph;
  std::vector<Vec3> blocks;
  Workspace workspace;
  ContainerSpec container;
  HumanBody body;
  std::vector<HumanModel> humans;
  int human_index = 0;
  JointVector home;
  Mode mode = Mode::kProactive;
  bool safety_enabled = true;
  std::uint64_t seed = 7;
  double dt = 1.0 / 30.0;
  double duration_cap = 240.0;
  double motion_time_min = 2.0;  // s, robot move duration range
  double motion_time_max = 3.0;
  double settle_tolerance = 0.05;  // rad
  double wrong_surface_patience = 1.5;  // s before a proactive worker asks
  int smoothing_window = 3;
  PlannerParams planner;
  SafetyParams safety;
  TrackingGains gains;
  HazardParams hazards;

  const HumanModel& human() const { return humans.at(human_index); }
  void validate() const;
};

Scenario default_scenario();

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& s, const std::string& path);

// Display pose of surface `surface` (1-based) and the nominal container
// geometry that goes with it.
Pose display_pose(const Scenario& s, int surface);
Pose container_pose(const Scenario& s, const Pose& tool);
Vec3 insertion_point(const Scenario& s, const Pose& tool);

}  // namespace hrc

#endif  // HRC_SCENARIO_HPP_
