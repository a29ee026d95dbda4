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

#ifndef HRC_HUMAN_HPP_
#define HRC_HUMAN_HPP_

#include <array>
#include <vector>

#include "hrc/geometry.hpp"
#include "hrc/scenario.hpp"

namespace hrc {

inline constexpr std::array<const char*, 10> kHumanParts = {
    "head",           "neck",          "torso",          "pelvis",
    "left_upper_arm", "left_forearm",  "left_hand",      "right_upper_arm",
    "right_forearm",  "right_hand"};

// The working (right) arm touches the container; every other part is
// avoided.
SafetySpec default_safety_spec();

struct BodyPose {
  Vec3 right_wrist = Vec3::Zero();
  Vec3 left_wrist = Vec3::Zero();
  double lean = 0.0;  // 0 upright, 1 full lean-in
};

Vec3 shoulder_position(const HumanBody& body, double lean, bool right);

// Two-link arm with the elbow bent down and outward. Near and beyond full
// extension the elbow keeps its shape and the forearm stretches.
Vec3 elbow_position(const Vec3& shoulder, const Vec3& wrist, double upper,
                    double fore, const Vec3& pole);

// Capsules in kHumanParts order; velocities are left at zero.
std::vector<EnvCapsule> body_capsules(const HumanBody& body,
                                      const BodyPose& pose);

// Straight point-to-point wrist motion under a trapezoidal speed profile.
// The path bulges sideways by `deviation` at its middle (sin profile).
class WristMotion {
 public:
  WristMotion() = default;
  WristMotion(const Vec3& start, const Vec3& goal, double speed,
              double acceleration, const Vec3& deviation = Vec3::Zero());

  double duration() const { return duration_; }
  Vec3 position(double t) const;
  const Vec3& goal() const { return goal_; }

 private:
  Vec3 start_ = Vec3::Zero();
  Vec3 goal_ = Vec3::Zero();
  Vec3 deviation_ = Vec3::Zero();
  double length_ = 0.0;
  double speed_ = 1.0;
  double accel_ = 1.0;
  double ramp_ = 0.0;  // acceleration phase duration
  double duration_ = 0.0;
};

}  // namespace hrc

#endif  // HRC_HUMAN_HPP_
