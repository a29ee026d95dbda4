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

#ifndef HRC_SIM_HPP_
#define HRC_SIM_HPP_

#include <deque>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hrc/error.hpp"
#include "hrc/human.hpp"
#include "hrc/intention.hpp"
#include "hrc/policy.hpp"
#include "hrc/safe_control.hpp"
#include "hrc/scenario.hpp"
#include "hrc/task_graph.hpp"

namespace hrc {

struct TelemetryRow {
  double time = 0.0;
  JointVector q, qdot, u, u_safe;
  double distance = kNoAvoidDistance;
  double distance_rate = 0.0;
  double phi = kNoHazardPhi;
  bool safety_triggered = false;
  bool emergency = false;
};

struct Event {
  double time = 0.0;
  std::string kind;
  std::string detail;

  bool operator==(const Event&) const = default;
};

// Totals derived from the event stream.
struct Totals {
  bool completed = false;
  double task_time = 0.0;
  std::vector<double> surface_times;      // between surface completions
  std::vector<double> block_times;        // between consecutive insertions
  std::vector<double> first_block_times;  // first block of each surface
};

Totals totals_from_events(const std::vector<Event>& events,
                          const TaskGraph& graph);

struct MetricsLog {
  std::vector<TelemetryRow> telemetry;
  std::vector<Event> events;
  Totals totals;
  double min_distance = kNoAvoidDistance;
  int safety_ticks = 0;
  int emergency_ticks = 0;
  int longest_phi_excursion = 0;  // consecutive ticks with phi > 0
  std::vector<double> recognition_leads;  // s, per recognized reach
  int reaches = 0;
  int predict_calls = 0;
};

void write_telemetry_csv(const MetricsLog& log, std::ostream& out);
void write_events_csv(const MetricsLog& log, std::ostream& out);

class SimulationTimeout : public Error {
 public:
  SimulationTimeout(const std::string& what, MetricsLog partial)
      : Error(ErrorCode::kTimeout, what), partial_(std::move(partial)) {}
  const MetricsLog& partial() const { return partial_; }

 private:
  MetricsLog partial_;
};

enum class Hazard { kNone, kLeftIncursion, kEarlyReach, kPosture };

const char* hazard_name(Hazard h);

struct SimOptions {
  Hazard hazard = Hazard::kNone;
  int stop_after_insertions = 0;  // 0 = the full task
  std::optional<Posture> posture;  // overrides the human model
};

enum class HumanPhase {
  kStart,
  kAwaitRobot,
  kThink,
  kReach,
  kGrab,
  kTransport,
  kWaitRobot,
  kInsert,
  kRetreat,
  kDone,
  kHold,
};

const char* human_phase_name(HumanPhase p);

struct HumanState {
  HumanPhase phase = HumanPhase::kStart;
  double phase_time = 0.0;
  int sequence_index = 0;  // next entry of the block sequence
  int block = 0;           // current target, 0 = none
  int held_block = 0;
  BodyPose pose;
  WristMotion motion;
  bool fallback_issued = false;
  double reach_start = 0.0;
  std::optional<double> recognized_at;
  std::optional<Vec3> wrist_override;
};

struct RobotCommand {
  double time = 0.0;
  int surface = 0;
};

// One simulated cell: worker, robot, container and task progress.
class Simulation {
 public:
  Simulation(Scenario scenario, const MLPParams* model,
             SimOptions options = {});

  void step();
  bool finished() const;
  // Runs to completion; throws SimulationTimeout at the duration cap.
  const MetricsLog& run();

  double time() const { return time_; }
  long tick() const { return tick_; }
  const Scenario& scenario() const { return scenario_; }
  const RobotState& robot() const { return robot_; }
  const RobotGoal& goal() const { return goal_; }
  bool goal_reached() const { return goal_reached_; }
  const TaskState& task() const { return task_; }
  const HumanState& human() const { return human_; }
  const EnvironmentState& environment() const { return env_; }
  const ControlOutput& control() const { return control_; }
  const std::vector<bool>& inserted() const { return inserted_; }
  std::optional<Prediction> intention() const { return intention_; }
  const MetricsLog& log() const { return log_; }
  bool alert() const { return alert_; }
  const std::optional<Trajectory>& trajectory() const { return trajectory_; }

  // Feature window at the current tick and the scripted ground truth.
  FeatureVector features() const;
  IntentionLabel ground_truth() const;

  void set_safety(bool enabled) { scenario_.safety_enabled = enabled; }
  void set_mode(Mode mode);
  void set_wrist_override(const Vec3& target);
  void clear_wrist_override();

 private:
  void update_human();
  void enter(HumanPhase phase);
  void start_motion(const Vec3& goal, double speed);
  void update_environment();
  void update_intention();
  void update_goal();
  void request_goal(const RobotGoal& goal);
  void update_robot();
  void record(const std::string& kind, const std::string& detail);
  void insert_block(int block);
  bool robot_shows(int surface) const;
  int surface_of(int block) const;
  Vec3 nominal_insertion() const;

  Scenario scenario_;
  const MLPParams* model_;
  SimOptions options_;
  PolicyTable table_;
  std::vector<int> sequence_;
  std::mt19937_64 rng_;

  double time_ = 0.0;
  long tick_ = 0;
  RobotState robot_;
  std::optional<Trajectory> trajectory_;
  RobotGoal goal_;
  bool goal_reached_ = true;
  double last_plan_failure_ = -1e9;
  std::vector<RobotCommand> commands_;
  TaskState task_;
  HumanState human_;
  std::vector<Vec3> block_positions_;
  std::vector<bool> inserted_;
  EnvironmentState env_;
  std::deque<Vec3> wrist_history_;
  IntentionSmoother smoother_;
  std::optional<Prediction> intention_;
  IntentionLabel smoothed_ = IntentionLabel::idle();
  bool alert_ = false;
  ControlOutput control_;
  int phi_run_ = 0;
  double think_time_ = 0.0;
  double grab_time_ = 0.0;
  WristMotion left_motion_;
  int left_stage_ = 0;  // 0 resting, 1 incursion, 2 retracting
  double left_stage_start_ = 0.0;
  int insertions_ = 0;
  MetricsLog log_;
};

MetricsLog run_scenario(const Scenario& scenario, const MLPParams* model,
                        const SimOptions& options = {});

// Scripted baseline episodes labeled with the reach target (Idle between
// reaches). Models default to the first two of the scenario.
LabeledDataset generate_demos(const Scenario& scenario,
                              const std::vector<int>& human_indices,
                              int trials, std::uint64_t seed);

// Expert labeling of a feature vector from its geometry alone: the block the
// wrist heads for, Idle when slow or heading nowhere, nullopt when two
// blocks are about equally likely.
std::optional<IntentionLabel> expert_label(const FeatureVector& x,
                                           double dt = 1.0 / 30.0);

struct HazardRun {
  Hazard hazard = Hazard::kNone;
  Posture posture = Posture::kConservative;
  bool safety = true;
  MetricsLog log;
};

// Left-hand incursion, early reach, and the first surface under both
// postures, with the scenario's safety setting.
std::vector<HazardRun> disturbance_suite(const Scenario& scenario);

}  // namespace hrc

#endif  // HRC_SIM_HPP_
