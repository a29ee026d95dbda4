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

#include "hrc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hrc {
namespace {

Eigen::Vector3d rotation_error(const Quat& target, const Quat& current) {
  const Eigen::AngleAxisd aa(target.normalized() *
                             current.normalized().conjugate());
  double angle = aa.angle();
  Eigen::Vector3d axis = aa.axis();
  if (angle > M_PI) {
    angle = 2.0 * M_PI - angle;
    axis = -axis;
  }
  return axis * angle;
}

JointVector clamp_limits(const JointVector& q, const ArmModel& model) {
  return q.cwiseMax(model.lower_limits()).cwiseMin(model.upper_limits());
}

double clearance(const JointVector& q, const EnvironmentState& env,
                 const SafetySpec& spec, const ArmModel& model) {
  return min_env_distance(forward_kinematics(q, model), env, spec).distance;
}

// Per joint, the cost Hessian over q_1..q_n is tridiagonal with the same
// entries; solve H x = g column by column (Thomas algorithm).
Eigen::MatrixXd solve_tridiagonal(const Eigen::MatrixXd& g, double goal_weight) {
  const int n = static_cast<int>(g.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 4.0);
  diag[n - 1] = 2.0 + 2.0 * goal_weight;
  const double off = -2.0;
  Eigen::VectorXd c(n);
  Eigen::MatrixXd d = g;
  Eigen::VectorXd b = diag;
  c[0] = off / b[0];
  d.row(0) /= b[0];
  for (int i = 1; i < n; ++i) {
    const double m = b[i] - off * c[i - 1];
    c[i] = off / m;
    d.row(i) = (d.row(i) - off * d.row(i - 1)) / m;
  }
  for (int i = n - 2; i >= 0; --i) d.row(i) -= c[i] * d.row(i + 1);
  return d;
}

}  // namespace

void PlannerParams::validate() const {
  if (horizon < 2)
    throw Error(ErrorCode::kInvalidArgument, "planner horizon must be >= 2");
  if (!(d_min > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "planner d_min must be > 0");
  if (!(tolerance > 0.0) || !(dt > 0.0) || margin < 0.0 || goal_weight <= 0.0)
    throw Error(ErrorCode::kInvalidArgument, "invalid planner parameters");
}

IkResult solve_ik(const Pose& target, const ArmModel& model,
                  const JointVector& seed, const IkParams& params) {
  if (seed.size() != model.link_count())
    throw Error(ErrorCode::kDimensionMismatch, "IK seed dimension mismatch");
  const Vec3 origin = model.base * Vec3::Zero();
  if ((target.position - origin).norm() > model.reach())
    throw Error(ErrorCode::kUnreachableGoal,
                "goal lies beyond the arm's reach");

  const int dof = model.link_count();
  IkResult r;
  r.q = clamp_limits(seed, model);
  for (int it = 0;; ++it) {
    const Pose cur = end_effector_pose(r.q, model);
    const Vec3 ep = target.position - cur.position;
    const Vec3 er = rotation_error(target.orientation, cur.orientation);
    r.position_error = ep.norm();
    r.rotation_error = er.norm();
    r.iterations = it;
    if (r.position_error < params.position_tolerance &&
        r.rotation_error < params.rotation_tolerance)
      return r;
    if (it >= params.max_iterations) break;

    Eigen::Matrix<double, 6, 1> e;
    e << ep, params.rotation_weight * er;
    Eigen::MatrixXd jac(6, dof);
    const double h = 1e-6;
    for (int j = 0; j < dof; ++j) {
      JointVector qp = r.q;
      qp[j] += h;
      const Pose p = end_effector_pose(qp, model);
      jac.block<3, 1>(0, j) = (p.position - cur.position) / h;
      jac.block<3, 1>(3, j) = params.rotation_weight *
                              rotation_error(p.orientation, cur.orientation) /
                              h;
    }
    const Eigen::Matrix<double, 6, 6> jjt =
        jac * jac.transpose() +
        params.damping * params.damping *
            Eigen::Matrix<double, 6, 6>::Identity();
    JointVector dq = jac.transpose() * jjt.ldlt().solve(e);
    const double biggest = dq.cwiseAbs().maxCoeff();
    if (biggest > 0.3) dq *= 0.3 / biggest;
    r.q = clamp_limits(r.q + dq, model);
  }
  std::ostringstream msg;
  msg << "inverse kinematics did not converge after " << params.max_iterations
      << " iterations (position error " << r.position_error
      << " m, rotation error " << r.rotation_error << " rad)";
  throw Error(ErrorCode::kUnreachableGoal, msg.str());
}

double trajectory_cost(const JointVector& q_start, const Trajectory& traj,
                       const JointVector& goal_q, double goal_weight) {
  double c = 0.0;
  JointVector prev = q_start;
  for (const JointVector& q : traj.waypoints) {
    c += (q - prev).squaredNorm();
    prev = q;
  }
  return c + goal_weight * (traj.final() - goal_q).squaredNorm();
}

namespace {

// Joint box, then distance pushes, then the per-step velocity box. Repeats
// because the velocity clamp can undo a push.
void project(const JointVector& q_start, Trajectory& traj,
             const EnvironmentState& env, const SafetySpec& spec,
             const ArmModel& model, const PlannerParams& p) {
  const double bound = p.d_min + p.margin;
  const JointVector step_limit = model.velocity_limits() * traj.dt;
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    for (int k = 0; k < traj.horizon(); ++k) {
      JointVector& q = traj.waypoints[k];
      q = clamp_limits(q, model);
      double d = clearance(q, env, spec, model);
      int push = 0;
      while (d < bound) {
        if (push++ >= p.max_push_iterations)
          throw InfeasiblePlan("waypoint " + std::to_string(k + 1) +
                                   " cannot be pushed clear of the human",
                               k + 1);
        JointVector grad(q.size());
        const double h = 1e-5;
        for (int j = 0; j < q.size(); ++j) {
          JointVector qp = q, qm = q;
          qp[j] += h;
          qm[j] -= h;
          grad[j] = (clearance(qp, env, spec, model) -
                     clearance(qm, env, spec, model)) /
                    (2.0 * h);
        }
        const double g2 = grad.squaredNorm();
        if (g2 < 1e-12)
          throw InfeasiblePlan("waypoint " + std::to_string(k + 1) +
                                   " has no clearance gradient",
                               k + 1);
        JointVector step = grad * ((bound + p.push_slack - d) / g2);
        const double biggest = step.cwiseAbs().maxCoeff();
        if (biggest > 0.2) step *= 0.2 / biggest;
        q = clamp_limits(q + step, model);
        d = clearance(q, env, spec, model);
        changed = true;
      }
    }
    JointVector prev = q_start;
    for (JointVector& q : traj.waypoints) {
      const JointVector delta = (q - prev).cwiseMax(-step_limit).cwiseMin(step_limit);
      if ((prev + delta - q).cwiseAbs().maxCoeff() > 0.0) changed = true;
      q = prev + delta;
      prev = q;
    }
    if (!changed) return;
  }
}

}  // namespace

void audit_trajectory(const JointVector& q_start, const Trajectory& traj,
                      const EnvironmentState& env, const SafetySpec& spec,
                      const ArmModel& model, const PlannerParams& params) {
  const JointVector step_limit = model.velocity_limits() * traj.dt;
  JointVector prev = q_start;
  for (int k = 0; k < traj.horizon(); ++k) {
    const JointVector& q = traj.waypoints[k];
    if (!model.within_limits(q))
      throw InfeasiblePlan("waypoint " + std::to_string(k + 1) +
                               " violates joint limits",
                           k + 1);
    if (((q - prev).cwiseAbs() - step_limit).maxCoeff() > 1e-9)
      throw InfeasiblePlan("waypoint " + std::to_string(k + 1) +
                               " violates velocity limits",
                           k + 1);
    if (clearance(q, env, spec, model) < params.d_min + params.margin - 1e-6)
      throw InfeasiblePlan("waypoint " + std::to_string(k + 1) +
                               " is closer than d_min + margin",
                           k + 1);
    prev = q;
  }
}

Trajectory plan(const JointVector& q_start, const Pose& goal,
                const EnvironmentState& env, const SafetySpec& spec,
                const ArmModel& model, const PlannerParams& params,
                PlanReport* report,
                const std::vector<JointVector>& extra_seeds) {
  params.validate();
  if (q_start.size() != model.link_count())
    throw Error(ErrorCode::kDimensionMismatch, "start state dimension mismatch");
  if (!model.within_limits(q_start))
    throw Error(ErrorCode::kInvalidArgument, "start state violates joint limits");

  JointVector goal_q;
  {
    std::vector<JointVector> seeds{q_start};
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
    std::string last_error;
    for (const JointVector& s : seeds) {
      try {
        goal_q = solve_ik(goal, model, s).q;
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnreachableGoal) throw;
        last_error = e.what();
      }
    }
    if (goal_q.size() == 0) throw Error(ErrorCode::kUnreachableGoal, last_error);
  }

  const int n = params.horizon;
  Trajectory traj;
  traj.dt = params.dt;
  for (int k = 1; k <= n; ++k)
    traj.waypoints.push_back(q_start + (goal_q - q_start) * (double(k) / n));
  project(q_start, traj, env, spec, model, params);

  double cost = trajectory_cost(q_start, traj, goal_q, params.goal_weight);
  std::vector<double> history{cost};
  double alpha = 1.0;
  int it = 0;
  const int dof = model.link_count();
  for (; it < params.max_iterations && alpha > 1e-3; ++it) {
    Eigen::MatrixXd grad(n, dof);
    for (int k = 0; k < n; ++k) {
      const JointVector& prev = k == 0 ? q_start : traj.waypoints[k - 1];
      JointVector g = 2.0 * (traj.waypoints[k] - prev);
      if (k + 1 < n) {
        g -= 2.0 * (traj.waypoints[k + 1] - traj.waypoints[k]);
      } else {
        g += 2.0 * params.goal_weight * (traj.waypoints[k] - goal_q);
      }
      grad.row(k) = g.transpose();
    }
    const Eigen::MatrixXd step = solve_tridiagonal(grad, params.goal_weight);

    Trajectory trial = traj;
    for (int k = 0; k < n; ++k)
      trial.waypoints[k] -= alpha * step.row(k).transpose();
    project(q_start, trial, env, spec, model, params);
    const double trial_cost =
        trajectory_cost(q_start, trial, goal_q, params.goal_weight);
    if (trial_cost <= cost) {
      const double change = cost - trial_cost;
      traj = std::move(trial);
      cost = trial_cost;
      history.push_back(cost);
      if (change < params.tolerance) {
        ++it;
        break;
      }
    } else {
      alpha *= 0.5;
    }
  }

  audit_trajectory(q_start, traj, env, spec, model, params);
  if (report != nullptr) {
    report->goal_q = goal_q;
    report->cost_history = std::move(history);
    report->iterations = it;
  }
  return traj;
}

}  // namespace hrc
