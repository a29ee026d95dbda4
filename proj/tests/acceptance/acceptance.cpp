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


// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Names on the command line select a subset.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "hrc/experiments.hpp"
#include "oracles.hpp"

using namespace hrc;
using namespace hrc::oracle;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const MLPParams& shipped_model() {
  static const MLPParams m = load_model_file(HRC_TEST_MODEL);
  return m;
}

std::vector<std::uint64_t> seeds(int n) {
  std::vector<std::uint64_t> s;
  for (int k = 1; k <= n; ++k) s.push_back(k);
  return s;
}

// Shared by the efficiency and lead criteria.
struct ComparisonRun {
  Comparison c;
  double seconds = 0.0;
};

const ComparisonRun& comparison() {
  static const ComparisonRun r = [] {
    ComparisonRun out;
    const auto t0 = Clock::now();
    out.c = compare_modes(default_scenario(), shipped_model(), seeds(10));
    out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
  }();
  return r;
}

Verdict efficiency() {
  const ComparisonRun& r = comparison();
  const double red = task_reduction(r.c);
  const double sb = describe(r.c.baseline.surface).avg, sp = describe(r.c.proactive.surface).avg;
  const double bb = describe(r.c.baseline.block).avg, bp = describe(r.c.proactive.block).avg;
  const bool ok = red >= 0.10 && red <= 0.25 && sp < sb && bp < bb && r.seconds < 120.0;
  return {ok, fmt("task %.1f%% lower, surface %.2f->%.2f s", 100 * red, sb, sp) +
                  fmt(", block %.2f->%.2f s, %.0f s runtime", bb, bp, r.seconds)};
}

Verdict recognition_lead() {
  const Stat s = describe(comparison().c.leads);
  return {s.count > 0 && s.avg >= 0.4 && s.avg <= 1.2,
          fmt("mean lead %.2f s over %.0f recognized reaches, %.0f missed", s.avg,
              static_cast<double>(s.count), comparison().c.unrecognized)};
}

Verdict safety() {
  const SuiteResult r = safety_suite(default_scenario(), seeds(10));
  const bool ok = r.safe_with_safety() && r.recovers() && r.penetrates_without_safety();
  int off_contacts = 0, off_runs = 0;
  for (const auto& e : r.entries)
    if (!e.safety) {
      ++off_runs;
      off_contacts += e.min_distance <= 0.0;
    }
  return {ok, fmt("%.0f runs; on: min D %.3f m, longest excursion %.0f ticks",
                  static_cast<double>(r.entries.size()), r.min_distance(true),
                  r.longest_excursion(true)) +
                  fmt("; off: %.0f/%.0f runs with D <= 0", off_contacts, off_runs)};
}

Verdict geometry() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Capsule a = random_capsule(rng), b = random_capsule(rng);
    worst = std::max(worst, std::abs(capsule_distance(a, b) - sampled_distance(a, b)));
  }
  const ArmModel m = default_arm_model();
  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    EnvironmentState env = random_env(rng, 12);
    SafetySpec spec;
    for (size_t i = 0; i < env.human.size(); ++i)
      spec.set(env.human[i].label, i % 3 ? ContactPolicy::kAvoid : ContactPolicy::kAllow);
    const CapsuleSet robot = forward_kinematics(random_q(rng, m), m);
    double best = kNoAvoidDistance;
    for (const auto& r : robot)
      for (const auto& e : env.human)
        if (spec.avoid(e.label)) best = std::min(best, capsule_distance(r, e.capsule));
    mismatches += min_env_distance(robot, env, spec).distance != best;
  }
  return {worst < 1e-3 && mismatches == 0,
          fmt("worst pair error %.2e m over 1000 pairs; %.0f/1000 enumeration mismatches",
              worst, mismatches)};
}

Verdict inference() {
  int small_bad = 0, small_n = 0;
  {
    const TaskGraph g = build_surface_graph(4, 2);
    const PathOracle o(g);
    for (const auto& full : all_sequences(4, 2))
      for (size_t k = 0; k <= full.size(); ++k, ++small_n) {
        const std::vector<int> prefix(full.begin(), full.begin() + k);
        small_bad += infer_progress(g, to_obs(prefix)).state.node != o.best(g, prefix);
      }
  }
  int big_bad = 0;
  {
    const TaskGraph g = build_surface_graph(4, 3);
    const PathOracle o(g);
    std::mt19937_64 rng(102);
    for (int k = 0; k < 10000; ++k) {
      const auto full = random_sequence(rng, 4, 3);
      const size_t len = std::uniform_int_distribution<size_t>(0, 12)(rng);
      const std::vector<int> prefix(full.begin(), full.begin() + len);
      big_bad += infer_progress(g, to_obs(prefix)).state.node != o.best(g, prefix);
    }
  }
  return {small_bad == 0 && big_bad == 0,
          fmt("4x2: %.0f/%.0f prefixes differ; 4x3: %.0f/10000 sampled differ", small_bad,
              small_n, big_bad)};
}

Verdict numerics() {
  const double grad = gradient_check(103, 10, 20);
  std::mt19937_64 rng(104);
  std::normal_distribution<double> n(0.0, 30.0);
  double norm_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd z(kNumIntentions);
    for (int i = 0; i < z.size(); ++i) z[i] = n(rng);
    norm_err = std::max(norm_err, std::abs(softmax(z).sum() - 1.0));
  }
  // Two-joint projection against the grid minimizer.
  const ArmModel arm = planar_arm();
  SafetyParams p;
  std::uniform_real_distribution<double> u(-1, 1);
  double grid_err = 0.0;
  int grid_n = 0;
  for (int tries = 0; grid_n < 20 && tries < 4000; ++tries) {
    RobotState s{JointVector(2), JointVector(2)};
    s.q << u(rng), u(rng) * 1.5;
    s.qdot << u(rng) * 1.5, u(rng) * 1.5;
    Vec3 at = forward_kinematics(s.q, arm)[1].b + Vec3(u(rng), u(rng), 0) * 0.4;
    at.z() = 0.0;
    const EnvironmentState env = point_obstacle(at, Vec3(u(rng), u(rng), 0) * 0.5, 0.05);
    const SafetyEval e = safety_index(s, env, avoid_head(), arm, p);
    if (!e.pair || e.distance < 0.03 || e.distance > 0.5) continue;
    JointVector nominal(2);
    nominal << u(rng) * 8, u(rng) * 8;
    const ControlOutput out = project_safe(nominal, s, env, avoid_head(), arm, p);
    if (!out.safety_triggered || out.emergency) continue;
    const auto best = grid_oracle(nominal, s, env, arm, p, reachable_box(s, arm, p));
    grid_err = std::max(grid_err, best ? (out.u_safe - *best).norm() : 1e9);
    ++grid_n;
  }
  // One joint against the closed form.
  const ControlBox box = ControlBox::symmetric(JointVector::Constant(1, 1e4));
  double closed_err = 0.0;
  std::uniform_real_distribution<double> qd(0.05, 0.6), vd(-2, 2), ud(-30, 30);
  for (int k = 0; k < 1000; ++k) {
    const double q = qd(rng), v = vd(rng), u0 = ud(rng);
    SafetyEval e;
    e.distance = q;
    e.distance_rate = v;
    e.phi = p.d_min * p.d_min - q * q - p.lambda * v;
    e.pair = ClosestPair{};
    const double bound =
        e.phi <= 0.0 ? (e.phi / p.dt - 2 * q * v) / p.lambda
                     : (e.phi - p.dt * 2 * q * v - target_of(e.phi, p)) / (p.dt * p.lambda);
    const ControlOutput out = ssa_filter(JointVector::Constant(1, u0), e,
                                         DistanceAccelModel{0.0, JointVector::Ones(1)},
                                         JointVector::Constant(1, v), p, box);
    const double want = std::max(u0, bound);
    closed_err = std::max(closed_err, std::abs(out.u_safe[0] - want) / std::max(1.0, std::abs(want)));
  }
  const bool ok = grad < 1e-4 && norm_err < 1e-9 && grid_n == 20 && grid_err < 2e-3 &&
                  closed_err < 1e-12;
  return {ok, fmt("gradient rel %.1e, softmax %.1e, 2-DOF grid %.1e, 1-D closed form %.1e",
                  grad, norm_err, grid_err, closed_err)};
}

Verdict iada() {
  const Scenario sc = default_scenario();
  double gain = 0.0, clean_min = 1.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    TrainSetup plain;
    plain.train.seed = s;
    TrainSetup robust = plain;
    robust.iada_rounds = 1;
    const TrainOutcome a = train_intention_model(sc, plain);
    const TrainOutcome b = train_intention_model(sc, robust);
    gain += (b.adversarial_accuracy - a.adversarial_accuracy) / 5.0;
    clean_min = std::min({clean_min, a.clean_accuracy, b.clean_accuracy});
  }
  TrainSetup plain;
  TrainSetup zero = plain;
  zero.iada_rounds = 1;
  zero.attack.epsilon = 0.0;
  const bool identical =
      train_intention_model(sc, plain).model == train_intention_model(sc, zero).model;
  return {gain >= 0.05 && clean_min >= 0.95 && identical,
          fmt("mean adversarial gain %.1f pp, worst clean %.1f%%, eps=0 identical %.0f",
              100 * gain, 100 * clean_min, identical)};
}

std::string csv(const MetricsLog& log) {
  std::ostringstream out;
  write_telemetry_csv(log, out);
  write_events_csv(log, out);
  return out.str();
}

Verdict determinism() {
  Scenario sc = default_scenario();
  bool same = csv(run_scenario(sc, &shipped_model())) == csv(run_scenario(sc, &shipped_model()));
  sc.mode = Mode::kBaseline;
  same = same && csv(run_scenario(sc, nullptr)) == csv(run_scenario(sc, nullptr));
  auto collect = [&] {
    std::string all;
    const Comparison c = compare_modes(default_scenario(), shipped_model(), {3, 4},
                                       [&](Mode, std::uint64_t, const MetricsLog& l) {
                                         all += csv(l);
                                       });
    return all + comparison_to_json(c);
  };
  same = same && collect() == collect();
  return {same, same ? "run and compare outputs byte-identical on repeat"
                     : "outputs differ on repeat"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"efficiency", efficiency}, {"recognition_lead", recognition_lead},
      {"safety_suite", safety},   {"geometry_oracle", geometry},
      {"inference_oracle", inference}, {"numerics", numerics},
      {"iada", iada},             {"determinism", determinism},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail
              << fmt(" [%.1f s]", secs) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
