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


#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "hrc/safe_control.hpp"

using namespace hrc;

using namespace hrc::oracle;

TEST_SUITE("safe_control") {

TEST_CASE("tracking at rest on the reference is zero") {
  RobotState s{JointVector::Constant(3, 0.4), JointVector::Zero(3)};
  CHECK(track(s.q, s, 60, 15, JointVector::Constant(3, 10)).isZero());
}

TEST_CASE("pure proportional tracking inside the clamp") {
  RobotState s{JointVector::Zero(2), JointVector::Zero(2)};
  JointVector ref(2);
  ref << 0.05, -0.02;
  CHECK((track(ref, s, 25, 0, JointVector::Constant(2, 10)) - 25 * ref).norm() < 1e-15);
  ref << 5.0, -5.0;
  const JointVector u = track(ref, s, 25, 0, JointVector::Constant(2, 10));
  CHECK(u[0] == 10.0);
  CHECK(u[1] == -10.0);
  CHECK_THROWS_AS(track(JointVector::Zero(3), s, 1, 1, JointVector()), Error);
}

TEST_CASE("critically damped step response barely overshoots") {
  const double dt = 1e-3;
  RobotState s{JointVector::Zero(1), JointVector::Zero(1)};
  const JointVector ref = JointVector::Constant(1, 1.0);
  double peak = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const JointVector u = track(ref, s, 25, 10, JointVector());
    s.qdot += u * dt;
    s.q += s.qdot * dt;
    peak = std::max(peak, s.q[0]);
  }
  CHECK(peak < 1.01);
  CHECK(s.q[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("safety index at the margin and at half a meter") {
  const ArmModel m = point_arm();
  SafetyParams p;
  RobotState s{JointVector::Zero(1), JointVector::Zero(1)};
  CHECK(safety_index(s, point_obstacle(Vec3(0.35, 0, 0)), avoid_head(), m, p).phi ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(safety_index(s, point_obstacle(Vec3(0.5, 0, 0)), avoid_head(), m, p).phi ==
        doctest::Approx(0.1225 - 0.25).epsilon(1e-12));
  EnvironmentState none;
  CHECK(safety_index(s, none, SafetySpec{}, m, p).phi == kNoHazardPhi);
}

TEST_CASE("phi rate from analytic terms matches finite differences") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  while (checked < 100) {
    RobotState s{JointVector(6), JointVector(6)};
    JointVector acc(6);
    for (int i = 0; i < 6; ++i) {
      s.q[i] = u(rng) * 1.5;
      s.qdot[i] = u(rng);
      acc[i] = u(rng) * 5;
    }
    const Vec3 at = Vec3(0.6, 0.0, 0.7) + 0.3 * Vec3(u(rng), u(rng), u(rng));
    const EnvironmentState env = point_obstacle(at, 0.5 * Vec3(u(rng), u(rng), u(rng)), 0.05);
    const SafetyEval e = safety_index(s, env, avoid_head(), m, p);
    if (e.distance < 0.05) continue;
    auto phi_at = [&](double t) {
      RobotState st{s.q + s.qdot * t + 0.5 * acc * t * t, s.qdot + acc * t};
      EnvironmentState en = env;
      en.human[0].capsule.a += en.human[0].velocity_a * t;
      en.human[0].capsule.b += en.human[0].velocity_b * t;
      return safety_index(st, en, avoid_head(), m, p).phi;
    };
    const double h = 1e-4;
    const double fd = (phi_at(h) - phi_at(-h)) / (2 * h);
    const double analytic = -2 * e.distance * e.distance_rate -
                            p.lambda * distance_accel(*e.pair, s, env, m, acc);
    CHECK(std::abs(fd - analytic) < 1e-3);
    ++checked;
  }
}

TEST_CASE("a safe nominal control passes unchanged") {
  const ArmModel m = point_arm();
  SafetyParams p;
  RobotState s{JointVector::Zero(1), JointVector::Zero(1)};
  const JointVector u = JointVector::Constant(1, 0.7);
  const ControlOutput out =
      project_safe(u, s, point_obstacle(Vec3(1.0, 0, 0)), avoid_head(), m, p);
  CHECK_FALSE(out.safety_triggered);
  CHECK(out.u_safe == u);
}

TEST_CASE("one-dimensional projection equals the closed form") {
  SafetyParams p;
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> qd(0.05, 0.6), vd(-2, 2), ud(-30, 30);
  const ControlBox box = ControlBox::symmetric(JointVector::Constant(1, 1e4));
  int safe_side = 0;
  for (int k = 0; k < 200; ++k) {
    const double q = qd(rng), v = vd(rng), u0 = ud(rng);
    SafetyEval e;
    e.distance = q;
    e.distance_rate = v;
    e.phi = p.d_min * p.d_min - q * q - p.lambda * v;
    e.pair = ClosestPair{};
    DistanceAccelModel acc{0.0, JointVector::Ones(1)};
    const ControlOutput out =
        ssa_filter(JointVector::Constant(1, u0), e, acc, JointVector::Constant(1, v), p, box);
    double bound;
    if (e.phi <= 0.0) {
      ++safe_side;
      bound = (e.phi / p.dt - 2 * q * v) / p.lambda;
    } else {
      bound = (e.phi + p.dt * (-2 * q * v) - target_of(e.phi, p)) / (p.dt * p.lambda);
    }
    const double closed = std::max(u0, bound);
    CHECK(out.u_safe[0] == doctest::Approx(closed).epsilon(1e-12).scale(1.0));
    CHECK(out.safety_triggered == (u0 < bound));
    CHECK_FALSE(out.emergency);
  }
  CHECK(safe_side >= 100);
}

TEST_CASE("two-joint projection matches a grid search") {
  const ArmModel m = planar_arm();
  SafetyParams p;
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0, tries = 0;
  while (checked < 20 && tries < 2000) {
    ++tries;
    RobotState s{JointVector(2), JointVector(2)};
    s.q << u(rng), u(rng) * 1.5;
    s.qdot << u(rng) * 1.5, u(rng) * 1.5;
    Vec3 at = forward_kinematics(s.q, m)[1].b + Vec3(u(rng), u(rng), 0) * 0.4;
    at.z() = 0.0;
    const EnvironmentState env = point_obstacle(at, Vec3(u(rng), u(rng), 0) * 0.5, 0.05);
    const SafetyEval e = safety_index(s, env, avoid_head(), m, p);
    if (!e.pair || e.distance < 0.03 || e.distance > 0.5) continue;
    JointVector nominal(2);
    nominal << u(rng) * 8, u(rng) * 8;
    const ControlOutput out = project_safe(nominal, s, env, avoid_head(), m, p);
    if (!out.safety_triggered || out.emergency) continue;
    const ControlBox box = reachable_box(s, m, p);
    const auto oracle = grid_oracle(nominal, s, env, m, p, box);
    REQUIRE(oracle.has_value());
    CHECK((out.u_safe - *oracle).norm() < 2e-3);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("inactive constraint leaves u exactly; active one is satisfied") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u(-1, 1);
  int active = 0, inactive = 0;
  for (int k = 0; k < 300; ++k) {
    RobotState s{JointVector(6), JointVector(6)};
    JointVector nominal(6);
    for (int i = 0; i < 6; ++i) {
      s.q[i] = u(rng) * 1.5;
      s.qdot[i] = u(rng);
      nominal[i] = u(rng) * 10;
    }
    const Vec3 at = Vec3(0.5, 0, 0.7) + 0.4 * Vec3(u(rng), u(rng), u(rng));
    const EnvironmentState env = point_obstacle(at, 0.5 * Vec3(u(rng), u(rng), u(rng)), 0.05);
    const SafetyEval e = safety_index(s, env, avoid_head(), m, p);
    if (!e.pair || e.distance <= 0.0) continue;
    const DistanceAccelModel acc = distance_accel_model(*e.pair, s, env, m);
    const double c = e.phi + p.dt * (-2 * e.distance * e.distance_rate - p.lambda * acc.offset);
    const double before = c - p.dt * p.lambda * acc.gain.dot(nominal);
    const ControlOutput out = project_safe(nominal, s, env, avoid_head(), m, p);
    if (before <= -p.eta * p.dt) {
      ++inactive;
      CHECK(out.u_safe == nominal);
    }
    if (!out.emergency) {
      ++active;
      CHECK(out.phi_next <= std::max(target_of(e.phi, p), e.phi - p.eta * p.dt * (e.phi + p.recovery_offset)) + 1e-9);
      CHECK((reachable_box(s, m, p).contains(out.u_safe) || !out.safety_triggered));
      if (e.phi <= 0.0) CHECK(out.phi_next <= 1e-9);
    }
  }
  CHECK(inactive > 20);
  CHECK(active > 20);
}

TEST_CASE("halfspace-box projection") {
  ControlBox box{JointVector::Constant(2, -1.0), JointVector::Constant(2, 1.0)};
  JointVector a(2), u(2);
  a << 1, 1;
  u << 0.9, 0.9;
  auto v = project_halfspace_box(u, a, 1.0, box);
  REQUIRE(v);
  CHECK((*v - JointVector::Constant(2, 0.5)).norm() < 1e-12);
  u << 0.9, -0.5;
  v = project_halfspace_box(u, a, -1.6, box);
  REQUIRE(v);
  CHECK(a.dot(*v) <= -1.6 + 1e-9);
  CHECK(box.contains(*v));
  CHECK_FALSE(project_halfspace_box(u, a, -2.5, box).has_value());
}

TEST_CASE("reachable box respects velocity and position limits") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  RobotState s{JointVector::Zero(6), JointVector::Zero(6)};
  s.q[1] = m.joints[1].upper - 1e-4;
  s.qdot[1] = 0.5;
  s.qdot[0] = m.joints[0].max_velocity;
  const ControlBox b = reachable_box(s, m, p);
  CHECK(b.upper[0] <= 1e-12);
  CHECK(b.upper[1] < 0.0);
  for (int i = 0; i < 6; ++i) CHECK(b.lower[i] <= b.upper[i]);
}

TEST_CASE("without avoid capsules control_step is pure tracking") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  TrackingGains g;
  Trajectory t;
  for (int k = 1; k <= 20; ++k) t.waypoints.push_back(JointVector::Constant(6, 0.02 * k));
  RobotState s{JointVector::Zero(6), JointVector::Zero(6)};
  RobotState r = s;
  for (int k = 0; k < 60; ++k) {
    const StepResult a = control_step(s, &t, EnvironmentState{}, SafetySpec{}, m, p, g, true);
    const StepResult b = control_step(r, &t, EnvironmentState{}, SafetySpec{}, m, p, g, false);
    CHECK_FALSE(a.output.safety_triggered);
    CHECK(a.next.q == b.next.q);
    CHECK(a.output.u_safe == a.output.u_nominal);
    s = a.next;
    r = b.next;
  }
}

TEST_CASE("a forced incursion triggers at once, never penetrates, and tracking resumes") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  TrackingGains g;
  JointVector a(6), b(6);
  a << 0.8, 0.6, 0.9, 0.0, 0.6, 0.0;
  b << -0.8, 0.6, 0.9, 0.0, 0.6, 0.0;
  Trajectory t;
  t.dt = 0.1;
  for (int k = 1; k <= 20; ++k) t.waypoints.push_back(a + (b - a) * (k / 20.0));
  RobotState s{a, JointVector::Zero(6)};
  const Vec3 tip = end_effector_pose(a, m).position;
  // A head 0.25 m from the tool, moving in at 0.5 m/s for one second.
  EnvironmentState env = point_obstacle(tip + Vec3(0.0, -0.3, 0.0), Vec3(0, 0.5, 0), 0.05);
  double min_d = 1e9;
  bool first = true;
  for (int k = 0; k < 30; ++k) {
    const StepResult r = control_step(s, &t, env, avoid_head(), m, p, g, true);
    if (first) CHECK(r.output.safety_triggered);
    first = false;
    min_d = std::min(min_d, r.output.distance);
    s = r.next;
    env.human[0].capsule.a += env.human[0].velocity_a * p.dt;
    env.human[0].capsule.b += env.human[0].velocity_b * p.dt;
  }
  CHECK(min_d > 0.0);
  // The hazard leaves; the trajectory completes.
  env = EnvironmentState{};
  for (int k = 0; k < 600 && !trajectory_finished(s, t, 0.02); ++k)
    s = control_step(s, &t, env, SafetySpec{}, m, p, g, true).next;
  CHECK(s.waypoint == t.horizon() - 1);
  CHECK(trajectory_finished(s, t, 0.02));
}

TEST_CASE("control_step is deterministic") {
  const ArmModel m = default_arm_model();
  SafetyParams p;
  TrackingGains g;
  const EnvironmentState env = point_obstacle(Vec3(0.3, 0.1, 0.9), Vec3(-0.2, 0, 0), 0.05);
  RobotState s{JointVector::Constant(6, 0.3), JointVector::Constant(6, 0.1)};
  Trajectory t;
  t.waypoints.push_back(JointVector::Constant(6, -0.3));
  const StepResult x = control_step(s, &t, env, avoid_head(), m, p, g, true);
  const StepResult y = control_step(s, &t, env, avoid_head(), m, p, g, true);
  CHECK(x.next.q == y.next.q);
  CHECK(x.next.qdot == y.next.qdot);
  CHECK(x.output.u_safe == y.output.u_safe);
}

}  // TEST_SUITE
