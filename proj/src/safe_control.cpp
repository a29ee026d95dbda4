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

#include "hrc/safe_control.hpp"

#include <algorithm>
#include <cmath>

namespace hrc {
namespace {

JointVector box_of(const SafetyParams& params, const ArmModel& model) {
  return params.u_max.size() == model.link_count()
             ? params.u_max
             : model.acceleration_limits();
}

JointVector clamp_box(const JointVector& u, const JointVector& box) {
  return u.cwiseMax(-box).cwiseMin(box);
}


// Distance of the pair after tau seconds of constant joint acceleration u
// and constant environment velocity.
double pair_distance_at(const ClosestPair& pair, const RobotState& s,
                        const EnvironmentState& env, const ArmModel& model,
                        const JointVector& u, double tau) {
  const JointVector q = s.q + s.qdot * tau + 0.5 * u * tau * tau;
  const Capsule link =
      model.joints[pair.robot_index].link.transformed(
          link_frames(q, model)[pair.robot_index]);
  const EnvCapsule& ec = env.capsule(pair.env_index);
  Capsule moved = ec.capsule;
  moved.a += ec.velocity_a * tau;
  moved.b += ec.velocity_b * tau;
  return capsule_distance(link, moved);
}

}  // namespace

ControlBox ControlBox::symmetric(const JointVector& u_max) {
  return ControlBox{-u_max, u_max};
}

JointVector ControlBox::clamp(const JointVector& u) const {
  return u.cwiseMax(lower).cwiseMin(upper);
}

bool ControlBox::contains(const JointVector& u) const {
  return (u - lower).minCoeff() >= 0.0 && (upper - u).minCoeff() >= 0.0;
}

ControlBox reachable_box(const RobotState& state, const ArmModel& model,
                         const SafetyParams& params) {
  const JointVector amax = box_of(params, model);
  const JointVector vmax = model.velocity_limits();
  const double dt = params.dt;
  ControlBox box = ControlBox::symmetric(amax);
  for (int i = 0; i < amax.size(); ++i) {
    const double q = state.q[i];
    const double v = state.qdot[i];
    // Velocity from which the joint can still stop before its limit.
    const double v_up = std::min(
        vmax[i], std::sqrt(2.0 * amax[i] *
                           std::max(0.0, model.joints[i].upper - q)));
    const double v_down = std::min(
        vmax[i], std::sqrt(2.0 * amax[i] *
                           std::max(0.0, q - model.joints[i].lower)));
    double lo = std::max({-amax[i], (-v_down - v) / dt,
                          (model.joints[i].lower - q - v * dt) / (dt * dt)});
    double hi = std::min({amax[i], (v_up - v) / dt,
                          (model.joints[i].upper - q - v * dt) / (dt * dt)});
    if (lo > hi) lo = hi = std::clamp(0.5 * (lo + hi), -amax[i], amax[i]);
    box.lower[i] = lo;
    box.upper[i] = hi;
  }
  return box;
}

void SafetyParams::validate() const {
  if (!(d_min > 0.0) || !(lambda > 0.0) || !(dt > 0.0) || eta < 0.0 ||
      recovery_offset < 0.0)
    throw Error(ErrorCode::kInvalidArgument,
                "safety parameters need d_min, lambda, dt > 0 and eta, "
                "recovery_offset >= 0");
}

JointVector track(const JointVector& reference, const RobotState& state,
                  double kp, double kd, const JointVector& u_max) {
  if (reference.size() != state.q.size() || state.qdot.size() != state.q.size())
    throw Error(ErrorCode::kDimensionMismatch, "tracking dimension mismatch");
  const JointVector u = kp * (reference - state.q) - kd * state.qdot;
  return u_max.size() == u.size() ? clamp_box(u, u_max) : u;
}

SafetyEval safety_index(const RobotState& state, const EnvironmentState& env,
                        const SafetySpec& spec, const ArmModel& model,
                        const SafetyParams& params) {
  SafetyEval out;
  const DistanceQuery dq =
      min_env_distance(forward_kinematics(state.q, model), env, spec);
  if (!dq.pair) return out;
  out.pair = dq.pair;
  out.distance = dq.distance;
  out.distance_rate = distance_rate(dq.pair, model, state.q, state.qdot, env);
  out.phi = params.d_min * params.d_min - out.distance * out.distance -
            params.lambda * out.distance_rate;
  return out;
}

double distance_accel(const ClosestPair& pair, const RobotState& state,
                      const EnvironmentState& env, const ArmModel& model,
                      const JointVector& u) {
  const double h = 1e-3;
  const double d0 = pair_distance_at(pair, state, env, model, u, 0.0);
  const double dp = pair_distance_at(pair, state, env, model, u, h);
  const double dm = pair_distance_at(pair, state, env, model, u, -h);
  return (dp - 2.0 * d0 + dm) / (h * h);
}

DistanceAccelModel distance_accel_model(const ClosestPair& pair,
                                        const RobotState& state,
                                        const EnvironmentState& env,
                                        const ArmModel& model) {
  const int n = model.link_count();
  DistanceAccelModel m;
  m.offset = distance_accel(pair, state, env, model, JointVector::Zero(n));
  m.gain.resize(n);
  const double c = 1.0;
  for (int j = 0; j < n; ++j) {
    JointVector e = JointVector::Zero(n);
    e[j] = c;
    m.gain[j] = (distance_accel(pair, state, env, model, e) -
                 distance_accel(pair, state, env, model, -e)) /
                (2.0 * c);
  }
  return m;
}

std::optional<JointVector> project_halfspace_box(const JointVector& u,
                                                 const JointVector& a, double b,
                                                 const ControlBox& box) {
  const JointVector u0 = box.clamp(u);
  if (a.dot(u0) <= b) return u0;
  const double a2 = a.squaredNorm();
  if (a2 <= 0.0) return std::nullopt;

  const JointVector direct = u - (a.dot(u) - b) / a2 * a;
  if (box.contains(direct)) return direct;

  // Least aligned corner of the box; if even that violates, no solution.
  double lowest = 0.0;
  for (int i = 0; i < a.size(); ++i)
    lowest += a[i] > 0.0 ? a[i] * box.lower[i] : a[i] * box.upper[i];
  if (lowest > b) return std::nullopt;

  // x(mu) = clamp(u - mu a) is the KKT path; a.x(mu) is non-increasing.
  double hi = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) hi = std::max(hi, (u[i] - box.lower[i]) / a[i]);
    if (a[i] < 0.0) hi = std::max(hi, (box.upper[i] - u[i]) / -a[i]);
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (a.dot(box.clamp(u - mid * a)) > b) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return box.clamp(u - hi * a);
}

ControlOutput ssa_filter(const JointVector& u, const SafetyEval& eval,
                         const DistanceAccelModel& accel,
                         const JointVector& qdot, const SafetyParams& params,
                         const ControlBox& box) {
  ControlOutput out;
  out.u_nominal = u;
  out.u_safe = u;
  out.phi = eval.phi;
  out.distance = eval.distance;
  out.distance_rate = eval.distance_rate;
  const double dt = params.dt;
  // phi_{k+1}(v) = c + a.v
  const double c = eval.phi + dt * (-2.0 * eval.distance * eval.distance_rate -
                                    params.lambda * accel.offset);
  const JointVector a = -dt * params.lambda * accel.gain;
  const double target =
      eval.phi > 0.0
          ? -params.eta * dt * std::min(eval.phi + params.recovery_offset, 1.0)
          : 0.0;

  out.phi_next = c + a.dot(u);
  if (out.phi_next <= target) return out;

  out.safety_triggered = true;
  std::optional<JointVector> v = project_halfspace_box(u, a, target - c, box);
  if (!v && eval.phi > 0.0) {
    // Exponential decay from the current value.
    const double decay =
        eval.phi - params.eta * dt * (eval.phi + params.recovery_offset);
    v = project_halfspace_box(u, a, decay - c, box);
  }
  if (v) {
    out.u_safe = *v;
  } else {
    out.u_safe = box.clamp(-qdot / dt);
    out.emergency = true;
  }
  out.phi_next = c + a.dot(out.u_safe);
  return out;
}

ControlOutput project_safe(const JointVector& u, const RobotState& state,
                           const EnvironmentState& env, const SafetySpec& spec,
                           const ArmModel& model, const SafetyParams& params) {
  if (!u.allFinite())
    throw Error(ErrorCode::kInvalidArgument, "non-finite nominal control");
  const SafetyEval eval = safety_index(state, env, spec, model, params);
  if (!eval.pair) {
    ControlOutput out;
    out.u_nominal = u;
    out.u_safe = u;
    return out;
  }
  const DistanceAccelModel acc =
      distance_accel_model(*eval.pair, state, env, model);
  return ssa_filter(u, eval, acc, state.qdot, params,
                    reachable_box(state, model, params));
}

bool trajectory_finished(const RobotState& state, const Trajectory& traj,
                         double tolerance) {
  return traj.horizon() > 0 && state.waypoint >= traj.horizon() - 1 &&
         (traj.final() - state.q).cwiseAbs().maxCoeff() < tolerance;
}

StepResult control_step(const RobotState& state, const Trajectory* trajectory,
                        const EnvironmentState& env, const SafetySpec& spec,
                        const ArmModel& model, const SafetyParams& params,
                        const TrackingGains& gains, bool safety_enabled) {
  StepResult r;
  r.next = state;
  const JointVector box = box_of(params, model);

  JointVector reference = state.q;
  if (trajectory != nullptr && trajectory->horizon() > 0) {
    const int last = trajectory->horizon() - 1;
    int k = std::min(state.waypoint, last);
    const int scheduled = std::min(
        last, static_cast<int>(std::floor(state.trajectory_clock /
                                          trajectory->dt + 1e-9)));
    k = std::max(k, scheduled);
    while (k < last &&
           (trajectory->waypoints[k] - state.q).norm() <
               gains.waypoint_tolerance)
      ++k;
    r.next.waypoint = k;
    reference = trajectory->waypoints[k];
  }

  const JointVector u = track(reference, state, gains.kp, gains.kd, box);
  if (safety_enabled) {
    r.output = project_safe(u, state, env, spec, model, params);
  } else {
    const SafetyEval eval = safety_index(state, env, spec, model, params);
    r.output.u_nominal = u;
    r.output.u_safe = u;
    r.output.phi = eval.phi;
    r.output.distance = eval.distance;
    r.output.distance_rate = eval.distance_rate;
  }

  const double dt = params.dt;
  const JointVector vmax = model.velocity_limits();
  JointVector qdot = (state.qdot + r.output.u_safe * dt).cwiseMax(-vmax).cwiseMin(vmax);
  JointVector q = state.q + qdot * dt;
  for (int i = 0; i < q.size(); ++i) {
    if (q[i] < model.joints[i].lower) {
      q[i] = model.joints[i].lower;
      qdot[i] = std::max(qdot[i], 0.0);
    } else if (q[i] > model.joints[i].upper) {
      q[i] = model.joints[i].upper;
      qdot[i] = std::min(qdot[i], 0.0);
    }
  }
  r.next.q = q;
  r.next.qdot = qdot;
  if (!r.output.safety_triggered) r.next.trajectory_clock += dt;
  return r;
}

}  // namespace hrc
