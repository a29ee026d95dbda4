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

#ifndef HRC_POLICY_HPP_
#define HRC_POLICY_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hrc/geometry.hpp"
#include "hrc/intention_label.hpp"
#include "hrc/task_graph.hpp"

namespace hrc {

enum class GoalKind { kDisplaySurface, kHoldCurrent, kAlert };

const char* goal_kind_name(GoalKind kind);
GoalKind parse_goal_kind(const std::string& name);

struct RobotGoal {
  GoalKind kind = GoalKind::kHoldCurrent;
  int surface = 0;  // 1-based, DisplaySurface only

  bool operator==(const RobotGoal&) const = default;
  std::string describe() const;
};

struct PolicyRule {
  std::set<IntentionLabel> intentions;
  RobotGoal goal;
};

// Rules of one graph level. With `alert_outside_admissible`, a reach toward
// a block that the task state does not admit raises an alert.
struct LevelPolicy {
  std::vector<PolicyRule> rules;
  bool alert_outside_admissible = false;
};

struct PolicyTable {
  std::map<int, LevelPolicy> levels;
  int surface_count = 4;

  // Throws unless every (intention, level) pair of `graph` maps to exactly
  // one goal.
  void validate(const TaskGraph& graph) const;
};

// Between surfaces: reach toward a block displays its surface. While a
// surface is in progress: alert on inadmissible reaches, otherwise hold.
PolicyTable default_policy_table(const TaskGraph& graph);

RobotGoal collaborate(IntentionLabel intention, const TaskState& state,
                      const TaskGraph& graph, const PolicyTable& table);

struct Workspace {
  std::vector<Pose> display_poses;  // index = surface - 1

  void validate() const;
};

struct GoalPose {
  Pose pose;
  bool alert = false;
};

// HoldCurrent and Alert keep `current`; Alert also raises the flag.
GoalPose goal_pose(const RobotGoal& goal, const Workspace& workspace,
                   const Pose& current);

}  // namespace hrc

#endif  // HRC_POLICY_HPP_
