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

#include "hrc/policy.hpp"

#include <cmath>

#include "hrc/error.hpp"

namespace hrc {

const char* goal_kind_name(GoalKind kind) {
  switch (kind) {
    case GoalKind::kDisplaySurface:
      return "DisplaySurface";
    case GoalKind::kHoldCurrent:
      return "HoldCurrent";
    case GoalKind::kAlert:
      return "Alert";
  }
  return "?";
}

GoalKind parse_goal_kind(const std::string& name) {
  if (name == "DisplaySurface") return GoalKind::kDisplaySurface;
  if (name == "HoldCurrent") return GoalKind::kHoldCurrent;
  if (name == "Alert") return GoalKind::kAlert;
  throw Error(ErrorCode::kParse, "unknown goal kind '" + name + "'");
}

std::string RobotGoal::describe() const {
  if (kind == GoalKind::kDisplaySurface)
    return "DisplaySurface(" + std::to_string(surface) + ")";
  return goal_kind_name(kind);
}

void PolicyTable::validate(const TaskGraph& graph) const {
  for (int level : graph.levels()) {
    auto it = levels.find(level);
    if (it == levels.end())
      throw Error(ErrorCode::kInvalidArgument,
                  "policy table has no entry for graph level " +
                      std::to_string(level));
    std::set<IntentionLabel> seen;
    for (const PolicyRule& r : it->second.rules) {
      if (r.goal.kind == GoalKind::kDisplaySurface &&
          (r.goal.surface < 1 || r.goal.surface > surface_count))
        throw Error(ErrorCode::kInvalidArgument,
                    "policy rule displays unknown surface " +
                        std::to_string(r.goal.surface));
      for (IntentionLabel h : r.intentions) {
        if (h.is_idle())
          throw Error(ErrorCode::kInvalidArgument,
                      "policy rules cannot remap Idle");
        if (!seen.insert(h).second)
          throw Error(ErrorCode::kInvalidArgument,
                      "intention " + h.name() +
                          " maps to two goals at level " +
                          std::to_string(level));
      }
    }
  }
}

PolicyTable default_policy_table(const TaskGraph& graph) {
  PolicyTable table;
  int surfaces = 0;
  for (int b : graph.all_blocks())
    surfaces = std::max(surfaces, graph.surface_of_block(b));
  table.surface_count = surfaces;

  std::map<int, bool> between;
  for (const TaskNode& n : graph.nodes()) {
    auto [it, fresh] = between.emplace(n.level, n.surface == 0);
    if (!fresh && it->second != (n.surface == 0))
      throw Error(ErrorCode::kInvalidArgument,
                  "graph level " + std::to_string(n.level) +
                      " mixes in-progress and between-surface nodes");
  }
  for (const auto& [level, is_between] : between) {
    LevelPolicy lp;
    if (is_between) {
      for (int s = 1; s <= surfaces; ++s) {
        PolicyRule r;
        r.goal = {GoalKind::kDisplaySurface, s};
        for (int b : graph.all_blocks())
          if (graph.surface_of_block(b) == s)
            r.intentions.insert(IntentionLabel::reach(b));
        lp.rules.push_back(r);
      }
    } else {
      lp.alert_outside_admissible = true;
    }
    table.levels[level] = lp;
  }
  return table;
}

RobotGoal collaborate(IntentionLabel intention, const TaskState& state,
                      const TaskGraph& graph, const PolicyTable& table) {
  if (intention.is_idle()) return {GoalKind::kHoldCurrent, 0};
  const int level = graph.node(state.node).level;
  const LevelPolicy& lp = table.levels.at(level);
  if (lp.alert_outside_admissible &&
      !valid_next_intentions(graph, state).count(intention))
    return {GoalKind::kAlert, 0};
  for (const PolicyRule& r : lp.rules)
    if (r.intentions.count(intention)) return r.goal;
  return {GoalKind::kHoldCurrent, 0};
}

void Workspace::validate() const {
  if (display_poses.empty())
    throw Error(ErrorCode::kInvalidArgument, "workspace has no display poses");
  for (const Pose& p : display_poses) {
    if (!p.position.allFinite() ||
        std::abs(p.orientation.norm() - 1.0) > 1e-9)
      throw Error(ErrorCode::kInvalidArgument,
                  "display pose needs a finite position and unit quaternion");
  }
}

GoalPose goal_pose(const RobotGoal& goal, const Workspace& workspace,
                   const Pose& current) {
  switch (goal.kind) {
    case GoalKind::kDisplaySurface:
      if (goal.surface < 1 ||
          goal.surface > static_cast<int>(workspace.display_poses.size()))
        throw Error(ErrorCode::kInvalidArgument,
                    "no display pose for surface " +
                        std::to_string(goal.surface));
      return {workspace.display_poses[goal.surface - 1], false};
    case GoalKind::kHoldCurrent:
      return {current, false};
    case GoalKind::kAlert:
      return {current, true};
  }
  return {current, false};
}

}  // namespace hrc
