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

#include "hrc/human.hpp"

#include <algorithm>
#include <cmath>

namespace hrc {

SafetySpec default_safety_spec() {
  SafetySpec spec;
  for (const char* part : kHumanParts) spec.set(part, ContactPolicy::kAvoid);
  spec.set("right_upper_arm", ContactPolicy::kAllow);
  spec.set("right_forearm", ContactPolicy::kAllow);
  spec.set("right_hand", ContactPolicy::kAllow);
  return spec;
}

Vec3 shoulder_position(const HumanBody& body, double lean, bool right) {
  // Worker faces -x, so the right side is +y.
  const double side = right ? 1.0 : -1.0;
  return body.torso_position +
         Vec3(0.0, side * body.shoulder_half_width, body.torso_height) +
         lean * body.lean_offset;
}

Vec3 elbow_position(const Vec3& shoulder, const Vec3& wrist, double upper,
                    double fore, const Vec3& pole) {
  Vec3 axis = wrist - shoulder;
  const double d = axis.norm();
  if (d < 1e-9) return shoulder + upper * pole.normalized();
  axis /= d;
  // Stay off full extension, where the elbow speed blows up.
  const double dc =
      std::clamp(d, std::abs(upper - fore) + 1e-6, 0.97 * (upper + fore));
  const double along = (upper * upper - fore * fore + dc * dc) / (2.0 * dc);
  const double h = std::sqrt(std::max(0.0, upper * upper - along * along));
  Vec3 n = pole - pole.dot(axis) * axis;
  if (n.norm() < 1e-9) n = axis.unitOrthogonal();
  return shoulder + along * axis + h * n.normalized();
}

std::vector<EnvCapsule> body_capsules(const HumanBody& b, const BodyPose& pose) {
  const double lean = std::clamp(pose.lean, 0.0, 1.0);
  const Vec3 base = b.torso_position;
  const Vec3 top = base + Vec3(0.0, 0.0, b.torso_height) + lean * b.lean_offset;
  const Vec3 up = (top - base).normalized();
  const Vec3 neck_top = top + b.neck_length * up;
  const Vec3 head_a = neck_top + b.head_radius * up;
  const Vec3 head_b = head_a + b.head_length * up;

  std::vector<EnvCapsule> out;
  auto add = [&](const char* label, const Vec3& a, const Vec3& c, double r) {
    out.push_back({label, {a, c, r}, Vec3::Zero(), Vec3::Zero()});
  };
  add("head", head_a, head_b, b.head_radius);
  add("neck", top, neck_top, b.neck_radius);
  add("torso", base, top, b.torso_radius);
  add("pelvis", base + Vec3(0.0, -b.pelvis_half_width, 0.0),
      base + Vec3(0.0, b.pelvis_half_width, 0.0), b.pelvis_radius);
  for (int side = 0; side < 2; ++side) {
    const bool right = side == 1;
    const Vec3 shoulder = shoulder_position(b, lean, right);
    const Vec3& wrist = right ? pose.right_wrist : pose.left_wrist;
    const Vec3 pole(0.0, right ? 0.6 : -0.6, -1.0);
    const Vec3 elbow =
        elbow_position(shoulder, wrist, b.upper_arm, b.forearm, pole);
    Vec3 dir = wrist - elbow;
    dir = dir.norm() > 1e-9 ? dir.normalized() : Vec3(-1.0, 0.0, 0.0);
    add(right ? "right_upper_arm" : "left_upper_arm", shoulder, elbow,
        b.arm_radius);
    add(right ? "right_forearm" : "left_forearm", elbow, wrist, b.arm_radius);
    add(right ? "right_hand" : "left_hand", wrist, wrist + b.hand * dir,
        b.hand_radius);
  }
  // Keep kHumanParts order: head, neck, torso, pelvis, left..., right...
  return out;
}

WristMotion::WristMotion(const Vec3& start, const Vec3& goal, double speed,
                         double acceleration, const Vec3& deviation)
    : start_(start),
      goal_(goal),
      deviation_(deviation),
      length_((goal - start).norm()),
      speed_(speed),
      accel_(acceleration) {
  if (!(speed > 0.0) || !(acceleration > 0.0))
    throw Error(ErrorCode::kInvalidArgument,
                "wrist motion needs positive speed and acceleration");
  if (length_ * accel_ < speed_ * speed_) {
    // Triangular profile.
    ramp_ = std::sqrt(length_ / accel_);
    speed_ = accel_ * ramp_;
    duration_ = 2.0 * ramp_;
  } else {
    ramp_ = speed_ / accel_;
    duration_ = length_ / speed_ + ramp_;
  }
}

Vec3 WristMotion::position(double t) const {
  if (length_ <= 0.0 || t >= duration_) return goal_;
  if (t <= 0.0) return start_;
  double s;
  if (t < ramp_) {
    s = 0.5 * accel_ * t * t;
  } else if (t > duration_ - ramp_) {
    const double r = duration_ - t;
    s = length_ - 0.5 * accel_ * r * r;
  } else {
    s = 0.5 * accel_ * ramp_ * ramp_ + speed_ * (t - ramp_);
  }
  const double u = std::clamp(s / length_, 0.0, 1.0);
  const double bump = std::sin(M_PI * u);
  return start_ + u * (goal_ - start_) + bump * bump * deviation_;
}

}  // namespace hrc
