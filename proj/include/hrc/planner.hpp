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

#ifndef HRC_PLANNER_HPP_
#define HRC_PLANNER_HPP_

#include <vector>

#include "hrc/error.hpp"
#include "hrc/geometry.hpp"

namespace hrc {

struct Trajectory {
  std::vector<JointVector> waypoints;  // q_1 .. q_n
  double dt = 0.1;                     // seconds between waypoints

  int horizon() const { return static_cast<int>(waypoints.size()); }
  const JointVector& final() const { return waypoints.back(); }
};

struct PlannerParams {
  int horizon = 20;
  double dt = 0.1;
  double goal_weight = 1000.0;   // terminal term against smoothness
  double d_min = 0.35;           // m
  double margin = 0.06;          // kappa * sigma, m; kappa = 3, sigma = 0.02
  double push_slack = 0.01;      // pushed waypoints clear the bound by this
  int max_iterations = 60;
  double tolerance = 1e-8;       // cost change at convergence
  int max_push_iterations = 40;

  void validate() const;
};

struct IkParams {
  double position_tolerance = 1e-3;  // m
  double rotation_tolerance = 1e-2;  // rad
  int max_iterations = 200;
  double damping = 0.05;
  double rotation_weight = 0.3;  // m per rad in the stacked error
};

struct IkResult {
  JointVector q;
  int iterations = 0;
  double position_error = 0.0;
  double rotation_error = 0.0;
};

// Damped least squares with a numerical Jacobian, clamped to joint limits.
// Throws kUnreachableGoal when it cannot converge.
IkResult solve_ik(const Pose& target, const ArmModel& model,
                  const JointVector& seed, const IkParams& params = {});

inline JointVector inverse_kinematics(const Pose& target, const ArmModel& model,
                                      const JointVector& seed) {
  return solve_ik(target, model, seed).q;
}

class InfeasiblePlan : public Error {
 public:
  InfeasiblePlan(const std::string& what, int waypoint)
      : Error(ErrorCode::kInfeasiblePlan, what), waypoint_(waypoint) {}
  int waypoint() const { return waypoint_; }

 private:
  int waypoint_;
};

struct PlanReport {
  JointVector goal_q;
  std::vector<double> cost_history;  // accepted iterates, first = initial
  int iterations = 0;
};

double trajectory_cost(const JointVector& q_start, const Trajectory& traj,
                       const JointVector& goal_q, double goal_weight);

// Joint-space trajectory to `goal` whose waypoints all keep at least
// d_min + margin from every avoid capsule of the frozen environment.
Trajectory plan(const JointVector& q_start, const Pose& goal,
                const EnvironmentState& env, const SafetySpec& spec,
                const ArmModel& model, const PlannerParams& params,
                PlanReport* report = nullptr,
                const std::vector<JointVector>& extra_seeds = {});

// Throws InfeasiblePlan naming the first waypoint that breaks a joint,
// velocity or distance bound.
void audit_trajectory(const JointVector& q_start, const Trajectory& traj,
                      const EnvironmentState& env, const SafetySpec& spec,
                      const ArmModel& model, const PlannerParams& params);

}  // namespace hrc

#endif  // HRC_PLANNER_HPP_
