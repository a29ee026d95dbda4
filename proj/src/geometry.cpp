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

#include "hrc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "hrc/error.hpp"

namespace hrc {
namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Zero-length segments yield a zero denominator; the parameter then clamps
// to 0 and the segment behaves as its first endpoint.
double safe_ratio(double num, double den) {
  return den > 1e-15 ? num / den : 0.0;
}

}  // namespace

double orientation_angle(const Quat& a, const Quat& b) {
  return a.normalized().angularDistance(b.normalized());
}

SegmentClosest closest_segment_points(const Vec3& p1, const Vec3& q1,
                                      const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;

  constexpr double kTiny = 1e-18;
  double s = 0.0, t = 0.0;
  if (a <= kTiny && e <= kTiny) {
    // Both points.
  } else if (a <= kTiny) {
    t = clamp01(f / e);
  } else if (e <= kTiny) {
    s = clamp01(-c / a);
  } else {
    s = clamp01(safe_ratio(b * f - c * e, denom));
    t = (b * s + f) / e;
    if (t < 0.0) {
      t = 0.0;
      s = clamp01(-c / a);
    } else if (t > 1.0) {
      t = 1.0;
      s = clamp01((b - c) / a);
    }
  }

  SegmentClosest out;
  out.s = s;
  out.t = t;
  out.p = p1 + d1 * s;
  out.q = p2 + d2 * t;
  out.distance = (out.p - out.q).norm();
  return out;
}

double capsule_distance(const Capsule& a, const Capsule& b) {
  return closest_segment_points(a.a, a.b, b.a, b.b).distance - a.radius -
         b.radius;
}

JointVector ArmModel::lower_limits() const {
  JointVector v(link_count());
  for (int i = 0; i < link_count(); ++i) v[i] = joints[i].lower;
  return v;
}

JointVector ArmModel::upper_limits() const {
  JointVector v(link_count());
  for (int i = 0; i < link_count(); ++i) v[i] = joints[i].upper;
  return v;
}

JointVector ArmModel::velocity_limits() const {
  JointVector v(link_count());
  for (int i = 0; i < link_count(); ++i) v[i] = joints[i].max_velocity;
  return v;
}

JointVector ArmModel::acceleration_limits() const {
  JointVector v(link_count());
  for (int i = 0; i < link_count(); ++i) v[i] = joints[i].max_acceleration;
  return v;
}

bool ArmModel::within_limits(const JointVector& q, double tol) const {
  if (q.size() != link_count()) return false;
  for (int i = 0; i < link_count(); ++i) {
    if (q[i] < joints[i].lower - tol || q[i] > joints[i].upper + tol)
      return false;
  }
  return true;
}

void ArmModel::validate() const {
  if (joints.empty())
    throw Error(ErrorCode::kInvalidArgument, "arm model has no links");
  for (const auto& j : joints) {
    if (!(j.lower < j.upper))
      throw Error(ErrorCode::kInvalidArgument,
                  "joint '" + j.name + "' has lower >= upper limit");
    if (!(j.max_velocity > 0.0) || !(j.max_acceleration > 0.0))
      throw Error(ErrorCode::kInvalidArgument,
                  "joint '" + j.name + "' needs positive rate limits");
    if (j.axis.norm() < 1e-9)
      throw Error(ErrorCode::kInvalidArgument,
                  "joint '" + j.name + "' has a zero axis");
    if (j.link.radius < 0.0 || !j.link.a.allFinite() || !j.link.b.allFinite())
      throw Error(ErrorCode::kInvalidArgument,
                  "joint '" + j.name + "' has an invalid capsule");
  }
}

double ArmModel::reach() const {
  double total = 0.0;
  for (const auto& j : joints) total += j.offset.norm();
  return total + tool_offset.norm();
}

ArmModel default_arm_model() {
  const double lengths[] = {0.30, 0.30, 0.25, 0.15, 0.10, 0.10};
  const double vel[] = {1.6, 1.6, 1.6, 2.2, 2.2, 2.2};
  const double acc[] = {12.0, 12.0, 12.0, 16.0, 16.0, 16.0};
  ArmModel m;
  for (int i = 0; i < 6; ++i) {
    Joint j;
    j.name = "joint_" + std::to_string(i + 1);
    j.axis = (i % 2 == 0) ? Vec3::UnitZ() : Vec3::UnitY();
    j.offset = i == 0 ? Vec3::Zero() : Vec3(0.0, 0.0, lengths[i - 1]);
    j.link = {Vec3::Zero(), Vec3(0.0, 0.0, lengths[i]), 0.05};
    j.lower = (i % 2 == 0) ? -2.9 : -2.6;
    j.upper = -j.lower;
    j.max_velocity = vel[i];
    j.max_acceleration = acc[i];
    m.joints.push_back(j);
  }
  m.tool_offset = Vec3(0.0, 0.0, lengths[5]);
  return m;
}

std::vector<Eigen::Isometry3d> link_frames(const JointVector& q,
                                           const ArmModel& model) {
  if (q.size() != model.link_count())
    throw Error(ErrorCode::kDimensionMismatch,
                "joint vector has " + std::to_string(q.size()) +
                    " entries, model has " +
                    std::to_string(model.link_count()) + " links");
  std::vector<Eigen::Isometry3d> frames;
  frames.reserve(model.joints.size());
  Eigen::Isometry3d t = model.base;
  for (int i = 0; i < model.link_count(); ++i) {
    const Joint& j = model.joints[i];
    t.translate(j.offset);
    t.rotate(Eigen::AngleAxisd(q[i], j.axis.normalized()));
    frames.push_back(t);
  }
  return frames;
}

CapsuleSet forward_kinematics(const JointVector& q, const ArmModel& model) {
  const auto frames = link_frames(q, model);
  CapsuleSet out;
  out.reserve(frames.size());
  for (size_t i = 0; i < frames.size(); ++i)
    out.push_back(model.joints[i].link.transformed(frames[i]));
  return out;
}

Pose end_effector_pose(const JointVector& q, const ArmModel& model) {
  const auto frames = link_frames(q, model);
  const Eigen::Isometry3d& last = frames.back();
  Pose p;
  p.position = last * model.tool_offset;
  p.orientation = Quat(last.rotation());
  return p;
}

const EnvCapsule& EnvironmentState::capsule(int index) const {
  const int nh = static_cast<int>(human.size());
  return index < nh ? human[index] : obstacles[index - nh];
}

const EnvCapsule* EnvironmentState::find(const std::string& label) const {
  for (const auto& c : human)
    if (c.label == label) return &c;
  for (const auto& c : obstacles)
    if (c.label == label) return &c;
  return nullptr;
}

void EnvironmentState::validate() const {
  std::unordered_map<std::string, int> seen;
  for (int i = 0; i < capsule_count(); ++i) {
    const EnvCapsule& c = capsule(i);
    if (seen[c.label]++ > 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate environment capsule label '" + c.label + "'");
    if (!c.velocity_a.allFinite() || !c.velocity_b.allFinite())
      throw Error(ErrorCode::kInvalidArgument,
                  "non-finite velocity on capsule '" + c.label + "'");
  }
}

bool SafetySpec::avoid(const std::string& label) const {
  auto it = flags_.find(label);
  if (it == flags_.end())
    throw Error(ErrorCode::kInvalidArgument,
                "safety spec has no flag for capsule '" + label + "'");
  return it->second == ContactPolicy::kAvoid;
}

bool SafetySpec::covers(const EnvironmentState& env) const {
  for (int i = 0; i < env.capsule_count(); ++i)
    if (!flags_.count(env.capsule(i).label)) return false;
  return true;
}

DistanceQuery min_env_distance(const CapsuleSet& robot,
                               const EnvironmentState& env,
                               const SafetySpec& spec) {
  DistanceQuery best;
  for (int e = 0; e < env.capsule_count(); ++e) {
    const EnvCapsule& ec = env.capsule(e);
    if (!spec.avoid(ec.label)) continue;
    for (int r = 0; r < static_cast<int>(robot.size()); ++r) {
      const SegmentClosest sc = closest_segment_points(
          robot[r].a, robot[r].b, ec.capsule.a, ec.capsule.b);
      const double d = sc.distance - robot[r].radius - ec.capsule.radius;
      if (!best.pair || d < best.distance) {
        best.distance = d;
        best.pair = ClosestPair{r, e, sc.s, sc.t, sc.p, sc.q};
      }
    }
  }
  return best;
}

double pair_distance(const CapsuleSet& robot, const EnvironmentState& env,
                     int robot_index, int env_index) {
  return capsule_distance(robot.at(robot_index),
                          env.capsule(env_index).capsule);
}

double distance_rate(const std::optional<ClosestPair>& pair,
                     const ArmModel& model, const JointVector& q,
                     const JointVector& qdot, const EnvironmentState& env) {
  if (!pair)
    throw Error(ErrorCode::kNoAvoidCapsule,
                "no avoid capsule in scene; distance rate undefined");
  if (q.size() != model.link_count() || qdot.size() != model.link_count())
    throw Error(ErrorCode::kDimensionMismatch,
                "joint state does not match arm model");

  const int ri = pair->robot_index;
  const Capsule& link = model.joints.at(ri).link;
  const Vec3 local =
      link.a + (link.b - link.a) * pair->robot_param;  // material point
  const double h = 1e-6;
  const Vec3 fwd = link_frames(q + h * qdot, model)[ri] * local;
  const Vec3 bwd = link_frames(q - h * qdot, model)[ri] * local;
  const Vec3 v_robot = (fwd - bwd) / (2.0 * h);

  const EnvCapsule& ec = env.capsule(pair->env_index);
  const Vec3 v_env =
      ec.velocity_a * (1.0 - pair->env_param) + ec.velocity_b * pair->env_param;

  const Vec3 diff = pair->robot_point - pair->env_point;
  const double len = diff.norm();
  if (len < 1e-12) return 0.0;
  return (diff / len).dot(v_robot - v_env);
}

}  // namespace hrc
