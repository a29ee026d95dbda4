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

#include "hrc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace hrc {

namespace {

constexpr double kInsertSpeed = 0.3;      // m/s, staging to insertion
constexpr double kRetractSpeed = 0.8;     // m/s
constexpr double kOverrideSpeed = 1.5;    // m/s, stream-driven wrist
constexpr double kArrivedSpeed = 0.1;     // rad/s
constexpr double kReplanDelay = 0.5;      // s after a failed plan
constexpr double kCaptureRadius = 0.10;   // m, expert labeling
constexpr double kAmbiguity = 0.03;       // m

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

const char* hazard_name(Hazard h) {
  switch (h) {
    case Hazard::kNone:
      return "none";
    case Hazard::kLeftIncursion:
      return "left_hand_incursion";
    case Hazard::kEarlyReach:
      return "early_reach";
    case Hazard::kPosture:
      return "posture";
  }
  return "?";
}

const char* human_phase_name(HumanPhase p) {
  switch (p) {
    case HumanPhase::kStart:
      return "start";
    case HumanPhase::kAwaitRobot:
      return "await_robot";
    case HumanPhase::kThink:
      return "think";
    case HumanPhase::kReach:
      return "reach";
    case HumanPhase::kGrab:
      return "grab";
    case HumanPhase::kTransport:
      return "transport";
    case HumanPhase::kWaitRobot:
      return "wait_robot";
    case HumanPhase::kInsert:
      return "insert";
    case HumanPhase::kRetreat:
      return "retreat";
    case HumanPhase::kDone:
      return "done";
    case HumanPhase::kHold:
      return "hold";
  }
  return "?";
}

Totals totals_from_events(const std::vector<Event>& events,
                          const TaskGraph& graph) {
  Totals t;
  double last_insertion = 0.0;
  double last_surface = 0.0;
  bool surface_open = false;
  for (const Event& e : events) {
    if (e.kind == "insertion") {
      const double dt = e.time - last_insertion;
      t.block_times.push_back(dt);
      if (!surface_open) {
        t.first_block_times.push_back(dt);
        surface_open = true;
      }
      last_insertion = e.time;
      t.task_time = e.time;
    } else if (e.kind == "surface_complete") {
      t.surface_times.push_back(e.time - last_surface);
      last_surface = e.time;
      surface_open = false;
    } else if (e.kind == "task_complete") {
      t.completed = true;
      t.task_time = e.time;
    }
  }
  (void)graph;
  return t;
}

void write_telemetry_csv(const MetricsLog& log, std::ostream& out) {
  const int n = log.telemetry.empty() ? 0 : log.telemetry.front().q.size();
  out << "time";
  for (const char* name : {"q", "qd", "u", "us"})
    for (int i = 1; i <= n; ++i) out << ',' << name << i;
  out << ",D,Ddot,phi,safety_triggered,emergency\n";
  for (const TelemetryRow& r : log.telemetry) {
    out << fmt(r.time);
    for (const JointVector* v : {&r.q, &r.qdot, &r.u, &r.u_safe})
      for (int i = 0; i < v->size(); ++i) out << ',' << fmt((*v)[i]);
    out << ',' << fmt(r.distance) << ',' << fmt(r.distance_rate) << ','
        << fmt(r.phi) << ',' << (r.safety_triggered ? 1 : 0) << ','
        << (r.emergency ? 1 : 0) << '\n';
  }
}

void write_events_csv(const MetricsLog& log, std::ostream& out) {
  out << "time,kind,detail\n";
  for (const Event& e : log.events)
    out << fmt(e.time) << ',' << e.kind << ',' << e.detail << '\n';
}

Simulation::Simulation(Scenario scenario, const MLPParams* model,
                       SimOptions options)
    : scenario_(std::move(scenario)),
      model_(model),
      options_(options),
      rng_(scenario_.seed),
      smoother_(scenario_.smoothing_window) {
  scenario_.validate();
  scenario_.safety.dt = scenario_.dt;
  if (options_.hazard != Hazard::kNone) scenario_.mode = Mode::kBaseline;
  if (options_.posture) scenario_.humans[scenario_.human_index].posture = *options_.posture;
  if (scenario_.mode == Mode::kProactive && model_ == nullptr)
    throw Error(ErrorCode::kInvalidArgument,
                "proactive mode needs an intention model");
  table_ = default_policy_table(scenario_.graph);

  const HumanModel& h = scenario_.human();
  for (int s : h.surface_order)
    for (int b : h.block_order[s - 1]) sequence_.push_back(b);

  robot_.q = scenario_.home;
  robot_.qdot = JointVector::Zero(scenario_.arm.link_count());
  task_ = state_of(scenario_.graph, scenario_.graph.root());
  human_.pose = {scenario_.body.right_rest, scenario_.body.left_rest, 0.0};
  block_positions_ = scenario_.blocks;
  inserted_.assign(scenario_.blocks.size(), false);

  const int first_surface = surface_of(sequence_.front());
  switch (options_.hazard) {
    case Hazard::kLeftIncursion: {
      const Pose display = display_pose(scenario_, first_surface);
      robot_.q = solve_ik(display, scenario_.arm, scenario_.home).q;
      trajectory_ = Trajectory{{robot_.q}, scenario_.dt};
      goal_ = {GoalKind::kDisplaySurface, first_surface};
      human_.phase = HumanPhase::kHold;
      break;
    }
    case Hazard::kEarlyReach:
      commands_.push_back({0.0, first_surface});
      if (options_.stop_after_insertions == 0) options_.stop_after_insertions = 1;
      break;
    case Hazard::kPosture:
      if (options_.stop_after_insertions == 0)
        options_.stop_after_insertions =
            static_cast<int>(h.block_order[first_surface - 1].size());
      break;
    case Hazard::kNone:
      break;
  }
  update_environment();
  wrist_history_.push_back(human_.pose.right_wrist);
  control_ = project_safe(JointVector::Zero(robot_.q.size()), robot_, env_,
                          scenario_.safety_spec, scenario_.arm,
                          scenario_.safety);
}

int Simulation::surface_of(int block) const {
  return scenario_.graph.surface_of_block(block);
}

Vec3 Simulation::nominal_insertion() const {
  return insertion_point(scenario_, display_pose(scenario_, 1));
}

bool Simulation::robot_shows(int surface) const {
  return goal_.kind == GoalKind::kDisplaySurface && goal_.surface == surface &&
         goal_reached_;
}

bool Simulation::finished() const {
  if (options_.stop_after_insertions > 0 &&
      insertions_ >= options_.stop_after_insertions)
    return true;
  if (options_.hazard == Hazard::kLeftIncursion)
    return time_ >= scenario_.hazards.duration - 1e-9;
  return human_.phase == HumanPhase::kDone;
}

void Simulation::record(const std::string& kind, const std::string& detail) {
  log_.events.push_back({time_, kind, detail});
}

void Simulation::set_mode(Mode mode) {
  if (mode == Mode::kProactive && model_ == nullptr)
    throw Error(ErrorCode::kInvalidArgument,
                "proactive mode needs an intention model");
  scenario_.mode = mode;
  record("mode", mode_name(mode));
}

void Simulation::set_wrist_override(const Vec3& target) {
  if (!target.allFinite())
    throw Error(ErrorCode::kInvalidArgument, "wrist target must be finite");
  human_.wrist_override = target;
}

void Simulation::clear_wrist_override() {
  if (!human_.wrist_override) return;
  human_.wrist_override.reset();
  switch (human_.phase) {
    case HumanPhase::kReach:
    case HumanPhase::kTransport:
    case HumanPhase::kRetreat:
      start_motion(human_.motion.goal(), scenario_.human().reach_speed);
      human_.phase_time = 0.0;
      break;
    default:
      break;
  }
}

void Simulation::enter(HumanPhase phase) {
  human_.phase = phase;
  human_.phase_time = 0.0;
}

void Simulation::start_motion(const Vec3& goal, double speed) {
  const HumanModel& h = scenario_.human();
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma = h.noise_sigma;
  const Vec3 deviation(sigma * noise(rng_), sigma * noise(rng_),
                       0.5 * sigma * noise(rng_));
  human_.motion = WristMotion(human_.pose.right_wrist, goal, speed,
                              h.reach_acceleration, deviation);
}

void Simulation::update_human() {
  const double dt = scenario_.dt;
  const HumanModel& h = scenario_.human();
  HumanState& s = human_;
  BodyPose& pose = s.pose;

  if (options_.hazard == Hazard::kLeftIncursion) {
    const HazardParams& hz = scenario_.hazards;
    const double t = time_ - hz.incursion_start;
    if (t >= 0.0 && left_stage_ == 0) {
      std::normal_distribution<double> noise(0.0, 0.02);
      const Vec3 target = end_effector_pose(robot_.q, scenario_.arm).position +
                          Vec3(noise(rng_), noise(rng_), noise(rng_));
      const double speed = std::min(
          hz.incursion_speed, hz.incursion_speed * h.reach_speed / 0.8);
      left_motion_ = WristMotion(pose.left_wrist, target, speed,
                                 h.reach_acceleration);
      left_stage_ = 1;
      left_stage_start_ = time_;
    }
    if (left_stage_ == 1) {
      const double tl = time_ - left_stage_start_;
      pose.left_wrist = left_motion_.position(tl);
      if (tl >= left_motion_.duration() + hz.incursion_dwell) {
        left_motion_ = WristMotion(pose.left_wrist, scenario_.body.left_rest,
                                   kRetractSpeed, h.reach_acceleration);
        left_stage_ = 2;
        left_stage_start_ = time_;
      }
    } else if (left_stage_ == 2) {
      pose.left_wrist = left_motion_.position(time_ - left_stage_start_);
    }
  }

  if (s.wrist_override) {
    const Vec3 d = *s.wrist_override - pose.right_wrist;
    const double max_step = kOverrideSpeed * dt;
    pose.right_wrist += d.norm() > max_step ? d.normalized() * max_step : d;
  } else {
    s.phase_time += dt;
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    const bool early = options_.hazard == Hazard::kEarlyReach;
    switch (s.phase) {
      case HumanPhase::kHold:
      case HumanPhase::kDone:
        break;
      case HumanPhase::kStart: {
        if (s.sequence_index >= static_cast<int>(sequence_.size())) {
          enter(HumanPhase::kDone);
          break;
        }
        s.block = sequence_[s.sequence_index++];
        s.fallback_issued = false;
        const int surface = surface_of(s.block);
        if (scenario_.mode == Mode::kBaseline && !early &&
            !(goal_.kind == GoalKind::kDisplaySurface && goal_.surface == surface)) {
          commands_.push_back({time_ + h.command_latency, surface});
          record("command", "DisplaySurface(" + std::to_string(surface) + ")");
          enter(HumanPhase::kAwaitRobot);
        } else {
          enter(HumanPhase::kThink);
          think_time_ = h.think_duration * jitter(rng_);
        }
        break;
      }
      case HumanPhase::kAwaitRobot:
        if (robot_shows(surface_of(s.block))) {
          enter(HumanPhase::kThink);
          think_time_ = h.think_duration * jitter(rng_);
        }
        break;
      case HumanPhase::kThink:
        if (s.phase_time >= think_time_) {
          start_motion(scenario_.blocks[s.block - 1], h.reach_speed);
          enter(HumanPhase::kReach);
          s.reach_start = time_;
          s.recognized_at.reset();
          ++log_.reaches;
          record("reach", IntentionLabel::reach(s.block).name());
        }
        break;
      case HumanPhase::kReach:
        pose.right_wrist = s.motion.position(s.phase_time);
        if (s.phase_time >= s.motion.duration()) {
          enter(HumanPhase::kGrab);
          grab_time_ = h.grab_duration * jitter(rng_);
        }
        break;
      case HumanPhase::kGrab:
        if (s.phase_time >= grab_time_) {
          s.held_block = s.block;
          record("grab", IntentionLabel::reach(s.block).name());
          if (s.recognized_at)
            log_.recognition_leads.push_back(time_ - *s.recognized_at);
          const Vec3 ins = nominal_insertion();
          start_motion(early ? ins : ins + scenario_.container.staging_offset,
                       h.reach_speed);
          enter(HumanPhase::kTransport);
        }
        break;
      case HumanPhase::kTransport:
        pose.right_wrist = s.motion.position(s.phase_time);
        if (s.phase_time >= s.motion.duration()) {
          if (early) {
            start_motion(nominal_insertion(), kInsertSpeed);
            enter(HumanPhase::kInsert);
          } else {
            enter(HumanPhase::kWaitRobot);
          }
        }
        break;
      case HumanPhase::kWaitRobot: {
        const int surface = surface_of(s.block);
        if (robot_shows(surface)) {
          start_motion(nominal_insertion(), kInsertSpeed);
          enter(HumanPhase::kInsert);
        } else if (scenario_.mode == Mode::kProactive && !s.fallback_issued &&
                   s.phase_time >= scenario_.wrong_surface_patience &&
                   goal_reached_) {
          commands_.push_back({time_ + h.command_latency, surface});
          record("command", "DisplaySurface(" + std::to_string(surface) + ")");
          s.fallback_issued = true;
        }
        break;
      }
      case HumanPhase::kInsert:
        pose.right_wrist = s.motion.position(s.phase_time);
        if (s.phase_time >= h.insert_duration) {
          insert_block(s.block);
          s.held_block = 0;
          start_motion(scenario_.body.right_rest, h.reach_speed);
          enter(HumanPhase::kRetreat);
        }
        break;
      case HumanPhase::kRetreat:
        pose.right_wrist = s.motion.position(s.phase_time);
        if (s.phase_time >= s.motion.duration()) enter(HumanPhase::kStart);
        break;
    }
  }

  if (s.held_block > 0) block_positions_[s.held_block - 1] = pose.right_wrist;
  pose.lean = 0.0;
  if (h.posture == Posture::kProactive) {
    const double d = (pose.right_wrist - nominal_insertion()).norm();
    pose.lean = std::clamp(1.0 - d / scenario_.body.lean_distance, 0.0, 1.0);
  }
}

void Simulation::insert_block(int block) {
  task_ = advance(scenario_.graph, task_, {block, time_});
  inserted_[block - 1] = true;
  block_positions_[block - 1] = env_.container.position;
  ++insertions_;
  record("insertion", std::to_string(block));
  const int surface = surface_of(block);
  bool surface_done = true;
  for (int b : scenario_.graph.all_blocks())
    if (surface_of(b) == surface && !task_.completed.count(b)) surface_done = false;
  if (surface_done) record("surface_complete", std::to_string(surface));
  if (task_.completed.size() == scenario_.graph.all_blocks().size())
    record("task_complete", "");
}

void Simulation::update_environment() {
  auto caps = body_capsules(scenario_.body, human_.pose);
  if (env_.human.size() == caps.size()) {
    for (size_t i = 0; i < caps.size(); ++i) {
      caps[i].velocity_a = (caps[i].capsule.a - env_.human[i].capsule.a) / scenario_.dt;
      caps[i].velocity_b = (caps[i].capsule.b - env_.human[i].capsule.b) / scenario_.dt;
    }
  }
  env_.human = std::move(caps);
  env_.block_positions = block_positions_;
  env_.container =
      container_pose(scenario_, end_effector_pose(robot_.q, scenario_.arm));
  env_.timestamp = time_;
}

FeatureVector Simulation::features() const {
  const std::vector<Vec3> window(wrist_history_.begin(), wrist_history_.end());
  return featurize(window, scenario_.blocks, scenario_.dt);
}

IntentionLabel Simulation::ground_truth() const {
  if (human_.phase == HumanPhase::kReach && human_.block > 0 &&
      !human_.wrist_override &&
      feature_wrist_speed(features()) >= kIdleSpeed)
    return IntentionLabel::reach(human_.block);
  return IntentionLabel::idle();
}

void Simulation::update_intention() {
  wrist_history_.push_back(human_.pose.right_wrist);
  while (static_cast<int>(wrist_history_.size()) > kFeatureWindow)
    wrist_history_.pop_front();
  if (scenario_.mode != Mode::kProactive || model_ == nullptr) return;

  const Prediction p = predict(*model_, features());
  ++log_.predict_calls;
  intention_ = p;
  const IntentionLabel smoothed = smoother_.push(p.label);
  if (smoothed != smoothed_) record("intention", smoothed.name());
  smoothed_ = smoothed;
  const bool reaching = human_.phase == HumanPhase::kReach ||
                        human_.phase == HumanPhase::kGrab;
  if (reaching && !human_.recognized_at &&
      smoothed_ == IntentionLabel::reach(human_.block))
    human_.recognized_at = time_;
}

void Simulation::request_goal(const RobotGoal& goal) {
  if (goal == goal_) return;
  if (time_ - last_plan_failure_ < kReplanDelay) return;
  std::uniform_real_distribution<double> duration(scenario_.motion_time_min,
                                                  scenario_.motion_time_max);
  PlannerParams params = scenario_.planner;
  params.dt = duration(rng_) / params.horizon;
  try {
    Trajectory traj =
        plan(robot_.q, display_pose(scenario_, goal.surface), env_,
             scenario_.safety_spec, scenario_.arm, params, nullptr,
             {scenario_.home});
    trajectory_ = std::move(traj);
  } catch (const Error& e) {
    last_plan_failure_ = time_;
    record("plan_failed", goal.describe());
    return;
  }
  robot_.waypoint = 0;
  robot_.trajectory_clock = 0.0;
  goal_ = goal;
  goal_reached_ = false;
  record("goal", goal.describe());
}

void Simulation::update_goal() {
  for (auto it = commands_.begin(); it != commands_.end();) {
    if (it->time > time_ + 1e-9) {
      ++it;
      continue;
    }
    const RobotGoal g{GoalKind::kDisplaySurface, it->surface};
    request_goal(g);
    it = goal_ == g ? commands_.erase(it) : std::next(it);
  }
  if (scenario_.mode != Mode::kProactive || model_ == nullptr) return;
  const RobotGoal req =
      collaborate(smoothed_, task_, scenario_.graph, table_);
  if (req.kind == GoalKind::kAlert) {
    if (!alert_) record("alert", smoothed_.name());
    alert_ = true;
    return;
  }
  alert_ = false;
  if (req.kind == GoalKind::kDisplaySurface) request_goal(req);
}

void Simulation::update_robot() {
  const Trajectory* traj = trajectory_ ? &*trajectory_ : nullptr;
  const StepResult r =
      control_step(robot_, traj, env_, scenario_.safety_spec, scenario_.arm,
                   scenario_.safety, scenario_.gains, scenario_.safety_enabled);
  robot_ = r.next;
  control_ = r.output;
  if (!goal_reached_ && traj != nullptr &&
      trajectory_finished(robot_, *traj, scenario_.settle_tolerance) &&
      robot_.qdot.norm() < kArrivedSpeed) {
    goal_reached_ = true;
    record("arrived", goal_.describe());
  }

  TelemetryRow row;
  row.time = time_;
  row.q = robot_.q;
  row.qdot = robot_.qdot;
  row.u = control_.u_nominal;
  row.u_safe = control_.u_safe;
  row.distance = control_.distance;
  row.distance_rate = control_.distance_rate;
  row.phi = control_.phi;
  row.safety_triggered = control_.safety_triggered;
  row.emergency = control_.emergency;
  log_.telemetry.push_back(std::move(row));
  log_.min_distance = std::min(log_.min_distance, control_.distance);
  if (control_.safety_triggered) ++log_.safety_ticks;
  if (control_.emergency) ++log_.emergency_ticks;
  phi_run_ = control_.phi > 0.0 ? phi_run_ + 1 : 0;
  log_.longest_phi_excursion = std::max(log_.longest_phi_excursion, phi_run_);
}

void Simulation::step() {
  if (finished()) return;
  time_ += scenario_.dt;
  ++tick_;
  update_human();
  update_environment();
  update_intention();
  update_goal();
  update_robot();
  log_.totals = totals_from_events(log_.events, scenario_.graph);
}

const MetricsLog& Simulation::run() {
  while (!finished()) {
    if (time_ >= scenario_.duration_cap) {
      log_.totals = totals_from_events(log_.events, scenario_.graph);
      throw SimulationTimeout("simulation exceeded the duration cap of " +
                                  fmt(scenario_.duration_cap) + " s",
                              log_);
    }
    step();
  }
  log_.totals = totals_from_events(log_.events, scenario_.graph);
  return log_;
}

MetricsLog run_scenario(const Scenario& scenario, const MLPParams* model,
                        const SimOptions& options) {
  Simulation sim(scenario, model, options);
  return sim.run();
}

LabeledDataset generate_demos(const Scenario& scenario,
                              const std::vector<int>& human_indices,
                              int trials, std::uint64_t seed) {
  if (trials < 1)
    throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  LabeledDataset out;
  for (int idx : human_indices) {
    for (int k = 0; k < trials; ++k) {
      Scenario sc = scenario;
      sc.human_index = idx;
      sc.mode = Mode::kBaseline;
      sc.seed = seed * 1000003ULL + static_cast<std::uint64_t>(idx) * 101ULL +
                static_cast<std::uint64_t>(k);
      Simulation sim(sc, nullptr);
      while (!sim.finished()) {
        if (sim.time() >= sc.duration_cap)
          throw SimulationTimeout("demo episode exceeded the duration cap",
                                  sim.log());
        sim.step();
        out.push_back({sim.features(), sim.ground_truth(), Provenance::kOriginal});
      }
    }
  }
  return out;
}

std::optional<IntentionLabel> expert_label(const FeatureVector& x, double dt) {
  if (!x.allFinite()) return std::nullopt;
  if (feature_wrist_speed(x) < kIdleSpeed) return IntentionLabel::idle();
  // Window displacement w from |d_i + w| = r_i + closing_i * T, linear in
  // (w, |w|^2).
  const double span = (kFeatureWindow - 1) * dt;
  Eigen::Matrix<double, kNumBlocks, 4> a;
  Eigen::Matrix<double, kNumBlocks, 1> rhs;
  std::array<Vec3, kNumBlocks> d;
  for (int i = 0; i < kNumBlocks; ++i) {
    d[i] = x.segment<3>(4 * i) * kDisplacementScale;
    const double r = d[i].norm();
    const double r_old = r + x[4 * i + 3] * kSpeedScale * span;
    a.row(i) << 2.0 * d[i].transpose(), 1.0;
    rhs[i] = r_old * r_old - r * r;
  }
  const Eigen::Vector4d sol = a.colPivHouseholderQr().solve(rhs);
  const Vec3 w = sol.head<3>();
  if (!(w.norm() > 1e-9)) return IntentionLabel::idle();
  const Vec3 dir = w.normalized();
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  int best_block = 0;
  for (int i = 0; i < kNumBlocks; ++i) {
    const double along = d[i].dot(dir);
    if (along <= 0.0) continue;
    const double miss = (d[i] - along * dir).norm();
    if (miss < best) {
      second = best;
      best = miss;
      best_block = i + 1;
    } else if (miss < second) {
      second = miss;
    }
  }
  if (best_block == 0 || best > kCaptureRadius) return IntentionLabel::idle();
  if (second - best < kAmbiguity) return std::nullopt;
  return IntentionLabel::reach(best_block);
}

std::vector<HazardRun> disturbance_suite(const Scenario& scenario) {
  std::vector<HazardRun> out;
  auto run = [&](Hazard hazard, std::optional<Posture> posture) {
    SimOptions opt;
    opt.hazard = hazard;
    opt.posture = posture;
    Simulation sim(scenario, nullptr, opt);
    HazardRun r;
    r.hazard = hazard;
    r.posture = posture.value_or(scenario.human().posture);
    r.safety = scenario.safety_enabled;
    r.log = sim.run();
    out.push_back(std::move(r));
  };
  run(Hazard::kLeftIncursion, std::nullopt);
  run(Hazard::kEarlyReach, std::nullopt);
  run(Hazard::kPosture, Posture::kConservative);
  run(Hazard::kPosture, Posture::kProactive);
  return out;
}

}  // namespace hrc
