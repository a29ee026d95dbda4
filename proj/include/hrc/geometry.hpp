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

#ifndef HRC_GEOMETRY_HPP_
#define HRC_GEOMETRY_HPP_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace hrc {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using JointVector = Eigen::VectorXd;

// Line segment swept by a sphere. All lengths in meters.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;

  Capsule transformed(const Eigen::Isometry3d& t) const {
    return {t * a, t * b, radius};
  }
};

using CapsuleSet = std::vector<Capsule>;

struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

// Rotation angle (rad) between two orientations.
double orientation_angle(const Quat& a, const Quat& b);

struct SegmentClosest {
  double distance = 0.0;  // between the segments, radii excluded
  double s = 0.0;         // parameter on the first segment
  double t = 0.0;         // parameter on the second segment
  Vec3 p = Vec3::Zero();
  Vec3 q = Vec3::Zero();
};

SegmentClosest closest_segment_points(const Vec3& p1, const Vec3& q1,
                                      const Vec3& p2, const Vec3& q2);

// Signed surface distance; negative values measure penetration depth.
double capsule_distance(const Capsule& a, const Capsule& b);

struct Joint {
  std::string name;
  Vec3 axis = Vec3::UnitZ();     // rotation axis in the joint frame
  Vec3 offset = Vec3::Zero();    // translation from the parent frame
  Capsule link;                  // link volume expressed in the joint frame
  double lower = -M_PI;
  double upper = M_PI;
  double max_velocity = 1.0;      // rad/s
  double max_acceleration = 10.0; // rad/s^2
};

// Serial chain of revolute joints, one capsule per link.
struct ArmModel {
  Eigen::Isometry3d base = Eigen::Isometry3d::Identity();
  std::vector<Joint> joints;
  Vec3 tool_offset = Vec3::Zero();  // end effector in the last joint frame

  int link_count() const { return static_cast<int>(joints.size()); }
  JointVector lower_limits() const;
  JointVector upper_limits() const;
  JointVector velocity_limits() const;
  JointVector acceleration_limits() const;
  bool within_limits(const JointVector& q, double tol = 1e-9) const;
  void validate() const;
  double reach() const;  // upper bound on base-to-tool distance
};

// Six revolute joints with alternating vertical/horizontal axes.
ArmModel default_arm_model();

std::vector<Eigen::Isometry3d> link_frames(const JointVector& q,
                                           const ArmModel& model);
CapsuleSet forward_kinematics(const JointVector& q, const ArmModel& model);
Pose end_effector_pose(const JointVector& q, const ArmModel& model);

struct EnvCapsule {
  std::string label;
  Capsule capsule;
  Vec3 velocity_a = Vec3::Zero();  // m/s
  Vec3 velocity_b = Vec3::Zero();
};

struct EnvironmentState {
  std::vector<EnvCapsule> human;
  std::vector<EnvCapsule> obstacles;
  std::vector<Vec3> block_positions;
  Pose container;
  double timestamp = 0.0;

  int capsule_count() const {
    return static_cast<int>(human.size() + obstacles.size());
  }
  // Human capsules first, then obstacles.
  const EnvCapsule& capsule(int index) const;
  const EnvCapsule* find(const std::string& label) const;
  void validate() const;
};

enum class ContactPolicy { kAvoid, kAllow };

class SafetySpec {
 public:
  SafetySpec() = default;
  explicit SafetySpec(std::unordered_map<std::string, ContactPolicy> flags)
      : flags_(std::move(flags)) {}

  void set(const std::string& label, ContactPolicy policy) {
    flags_[label] = policy;
  }
  bool avoid(const std::string& label) const;
  bool covers(const EnvironmentState& env) const;
  const std::unordered_map<std::string, ContactPolicy>& flags() const {
    return flags_;
  }

 private:
  std::unordered_map<std::string, ContactPolicy> flags_;
};

inline constexpr double kNoAvoidDistance = 1e6;

struct ClosestPair {
  int robot_index = -1;
  int env_index = -1;  // index into EnvironmentState::capsule()
  double robot_param = 0.0;
  double env_param = 0.0;
  Vec3 robot_point = Vec3::Zero();
  Vec3 env_point = Vec3::Zero();
};

struct DistanceQuery {
  double distance = kNoAvoidDistance;
  std::optional<ClosestPair> pair;
};

DistanceQuery min_env_distance(const CapsuleSet& robot,
                               const EnvironmentState& env,
                               const SafetySpec& spec);

// Signed distance of one fixed robot/env capsule pair.
double pair_distance(const CapsuleSet& robot, const EnvironmentState& env,
                     int robot_index, int env_index);

// Time derivative of the closest-pair distance (negative when approaching).
// Throws kNoAvoidCapsule for a null pair.
double distance_rate(const std::optional<ClosestPair>& pair,
                     const ArmModel& model, const JointVector& q,
                     const JointVector& qdot, const EnvironmentState& env);

}  // namespace hrc

#endif  // HRC_GEOMETRY_HPP_
