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

#ifndef HRC_SAFE_CONTROL_HPP_
#define HRC_SAFE_CONTROL_HPP_

#include <limits>
#include <optional>

#include "hrc/geometry.hpp"
#include "hrc/planner.hpp"

namespace hrc {

struct RobotState {
  JointVector q;
  JointVector qdot;
  int waypoint = 0;            // index into the tracked trajectory
  double trajectory_clock = 0.0;  // s, paused while the safety layer acts
};

struct SafetyParams {
  double d_min = 0.35;     // m
  double lambda = 0.5;     // s
  double eta = 2.0;        // 1/s, decay demanded while phi > 0
  double recovery_offset = 0.02;  // m^2, decay target lies below zero
  double dt = 1.0 / 30.0;  // s
  JointVector u_max;       // rad/s^2, symmetric box; empty = arm limits

  void validate() const;
};

struct TrackingGains {
  double kp = 60.0;
  double kd = 15.5;
  double waypoint_tolerance = 0.02;  // rad
};

inline constexpr double kNoHazardPhi = -std::numeric_limits<double>::infinity();

struct SafetyEval {
  double phi = kNoHazardPhi;
  double distance = kNoAvoidDistance;
  double distance_rate = 0.0;
  std::optional<ClosestPair> pair;
};

// Nominal PD acceleration toward `reference`, clamped to +-u_max.
JointVector track(const JointVector& reference, const RobotState& state,
                  double kp, double kd, const JointVector& u_max);

// phi = d_min^2 - D^2 - lambda * Ddot. Safe iff phi <= 0; -inf when the
// scene holds no avoid capsule.
SafetyEval safety_index(const RobotState& state, const EnvironmentState& env,
                        const SafetySpec& spec, const ArmModel& model,
                        const SafetyParams& params);

// Second derivative of the fixed pair's distance under joint acceleration u,
// with the environment moving at its current velocity. Returns the affine
// model Ddd(u) = offset + gain . u.
struct DistanceAccelModel {
  double offset = 0.0;
  JointVector gain;
  double at(const JointVector& u) const { return offset + gain.dot(u); }
};

DistanceAccelModel distance_accel_model(const ClosestPair& pair,
                                        const RobotState& state,
                                        const EnvironmentState& env,
                                        const ArmModel& model);

double distance_accel(const ClosestPair& pair, const RobotState& state,
                      const EnvironmentState& env, const ArmModel& model,
                      const JointVector& u);

struct ControlOutput {
  JointVector u_nominal;
  JointVector u_safe;
  bool safety_triggered = false;
  bool emergency = false;
  double phi = kNoHazardPhi;
  double phi_next = kNoHazardPhi;  // one-step prediction under u_safe
  double distance = kNoAvoidDistance;
  double distance_rate = 0.0;
};

// Per-joint acceleration bounds for one tick.
struct ControlBox {
  JointVector lower;
  JointVector upper;
  static ControlBox symmetric(const JointVector& u_max);
  JointVector clamp(const JointVector& u) const;
  bool contains(const JointVector& u) const;
};

// Acceleration limits intersected with the accelerations that keep the next
// velocity within limits and the next position within the joint range.
ControlBox reachable_box(const RobotState& state, const ArmModel& model,
                         const SafetyParams& params);

// Minimal change of u inside the reachable box keeping the predicted
// phi_{k+1} <= 0, or <= -eta * dt * min(phi_k + recovery_offset, 1) once
// phi_k > 0. If that is infeasible, retries with the decay target
// phi_k - eta * dt * (phi_k + recovery_offset); maximum braking otherwise.
ControlOutput project_safe(const JointVector& u, const RobotState& state,
                           const EnvironmentState& env, const SafetySpec& spec,
                           const ArmModel& model, const SafetyParams& params);

// The same filter for a precomputed hazard: phi, D, Ddot and the affine
// distance acceleration model.
ControlOutput ssa_filter(const JointVector& u, const SafetyEval& eval,
                         const DistanceAccelModel& accel,
                         const JointVector& qdot, const SafetyParams& params,
                         const ControlBox& box);

// Halfspace a.u <= b intersected with the box. Returns the closest
// point to u, or nullopt when the intersection is empty.
std::optional<JointVector> project_halfspace_box(const JointVector& u,
                                                 const JointVector& a, double b,
                                                 const ControlBox& box);

struct StepResult {
  ControlOutput output;
  RobotState next;
};

// Track the active waypoint, filter through the safety layer (when enabled)
// and integrate semi-implicitly.
StepResult control_step(const RobotState& state, const Trajectory* trajectory,
                        const EnvironmentState& env, const SafetySpec& spec,
                        const ArmModel& model, const SafetyParams& params,
                        const TrackingGains& gains, bool safety_enabled = true);

bool trajectory_finished(const RobotState& state, const Trajectory& traj,
                         double tolerance);

}  // namespace hrc

#endif  // HRC_SAFE_CONTROL_HPP_
