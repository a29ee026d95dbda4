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


#include "hrc/stream.hpp"

#include <cmath>

#include "json.hpp"

namespace hrc {
namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::kParse, "expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json capsules_json(const std::vector<CapsuleView>& cs) {
  json out = json::array();
  for (const auto& c : cs)
    out.push_back({{"label", c.label},
                   {"a", vec_json(c.a)},
                   {"b", vec_json(c.b)},
                   {"radius", c.radius},
                   {"avoid", c.avoid}});
  return out;
}

std::vector<CapsuleView> capsules_from(const json& j) {
  std::vector<CapsuleView> out;
  for (const auto& c : j)
    out.push_back({c.at("label").get<std::string>(), vec_from(c.at("a")),
                   vec_from(c.at("b")), c.at("radius").get<double>(),
                   c.at("avoid").get<bool>()});
  return out;
}

json parse_object(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
  if (j.value("schema", std::string()) != kStreamSchema)
    throw Error(ErrorCode::kParse,
                std::string("schema tag must be ") + kStreamSchema);
  return j;
}

bool same_number(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

bool Snapshot::operator==(const Snapshot& o) const {
  return tick == o.tick && same_number(time, o.time) && q == o.q &&
         qdot == o.qdot && robot == o.robot && human == o.human &&
         right_wrist == o.right_wrist && blocks == o.blocks &&
         inserted == o.inserted && container_position == o.container_position &&
         container_orientation.coeffs() == o.container_orientation.coeffs() &&
         displayed_surface == o.displayed_surface &&
         same_number(distance, o.distance) &&
         same_number(distance_rate, o.distance_rate) && d_min == o.d_min &&
         same_number(phi, o.phi) && intention == o.intention &&
         confidence == o.confidence && ground_truth == o.ground_truth &&
         task_node == o.task_node && completed == o.completed &&
         active_surface == o.active_surface && goal_kind == o.goal_kind &&
         goal_surface == o.goal_surface && goal_reached == o.goal_reached &&
         safety_triggered == o.safety_triggered && emergency == o.emergency &&
         alert == o.alert && safety_enabled == o.safety_enabled &&
         wrist_override == o.wrist_override && finished == o.finished &&
         mode == o.mode && human_model == o.human_model &&
         human_phase == o.human_phase;
}

Snapshot make_snapshot(const Simulation& sim) {
  const Scenario& sc = sim.scenario();
  const RobotState& r = sim.robot();
  const EnvironmentState& env = sim.environment();
  Snapshot s;
  s.tick = sim.tick();
  s.time = sim.time();
  s.q.assign(r.q.data(), r.q.data() + r.q.size());
  s.qdot.assign(r.qdot.data(), r.qdot.data() + r.qdot.size());
  const CapsuleSet links = forward_kinematics(r.q, sc.arm);
  for (std::size_t i = 0; i < links.size(); ++i)
    s.robot.push_back({sc.arm.joints[i].name, links[i].a, links[i].b,
                       links[i].radius, false});
  for (const auto& c : env.human)
    s.human.push_back({c.label, c.capsule.a, c.capsule.b, c.capsule.radius,
                       sc.safety_spec.avoid(c.label)});
  s.right_wrist = sim.human().pose.right_wrist;
  s.blocks = env.block_positions;
  s.inserted = sim.inserted();
  s.container_position = env.container.position;
  s.container_orientation = env.container.orientation;
  const RobotGoal& goal = sim.goal();
  s.goal_kind = goal_kind_name(goal.kind);
  s.goal_surface = goal.surface;
  s.goal_reached = sim.goal_reached();
  s.displayed_surface =
      goal.kind == GoalKind::kDisplaySurface && s.goal_reached ? goal.surface
                                                               : 0;
  const ControlOutput& c = sim.control();
  s.distance = c.distance;
  s.distance_rate = c.distance_rate;
  s.d_min = sc.safety.d_min;
  s.phi = c.phi;
  if (const auto p = sim.intention()) {
    s.intention = p->label.name();
    s.confidence = p->confidence;
  }
  s.ground_truth = sim.ground_truth().name();
  const TaskState& t = sim.task();
  s.task_node = t.node;
  s.completed.assign(t.completed.begin(), t.completed.end());
  s.active_surface = t.active_surface;
  s.safety_triggered = c.safety_triggered;
  s.emergency = c.emergency;
  s.alert = sim.alert();
  s.safety_enabled = sc.safety_enabled;
  s.wrist_override = sim.human().wrist_override.has_value();
  s.finished = sim.finished();
  s.mode = mode_name(sc.mode);
  s.human_model = sc.human().name;
  s.human_phase = human_phase_name(sim.human().phase);
  return s;
}

std::string snapshot_to_json(const Snapshot& s) {
  json blocks = json::array();
  for (const auto& b : s.blocks) blocks.push_back(vec_json(b));
  const Quat& o = s.container_orientation;
  json j = {
      {"schema", kStreamSchema},
      {"type", "snapshot"},
      {"tick", s.tick},
      {"time", s.time},
      {"robot", {{"q", s.q}, {"qdot", s.qdot},
                 {"capsules", capsules_json(s.robot)}}},
      {"human", {{"capsules", capsules_json(s.human)},
                 {"right_wrist", vec_json(s.right_wrist)},
                 {"model", s.human_model},
                 {"phase", s.human_phase},
                 {"wrist_override", s.wrist_override}}},
      {"blocks", {{"positions", blocks}, {"inserted", s.inserted}}},
      {"container", {{"position", vec_json(s.container_position)},
                     {"orientation", {o.w(), o.x(), o.y(), o.z()}},
                     {"displayed_surface", s.displayed_surface}}},
      {"safety", {{"D", s.distance},
                  {"D_rate", s.distance_rate},
                  {"d_min", s.d_min},
                  {"phi", std::isfinite(s.phi) ? json(s.phi) : json(nullptr)},
                  {"triggered", s.safety_triggered},
                  {"emergency", s.emergency},
                  {"enabled", s.safety_enabled}}},
      {"intention", {{"label", s.intention ? json(*s.intention) : json(nullptr)},
                     {"confidence", s.confidence},
                     {"ground_truth", s.ground_truth}}},
      {"task", {{"node", s.task_node},
                {"completed", s.completed},
                {"active_surface", s.active_surface},
                {"finished", s.finished}}},
      {"goal", {{"kind", s.goal_kind},
                {"surface", s.goal_surface},
                {"reached", s.goal_reached}}},
      {"alert", s.alert},
      {"mode", s.mode},
  };
  return j.dump();
}

Snapshot snapshot_from_json(const std::string& text) {
  const json j = parse_object(text);
  Snapshot s;
  try {
    if (j.at("type") != "snapshot")
      throw Error(ErrorCode::kParse, "not a snapshot message");
    s.tick = j.at("tick").get<long>();
    s.time = j.at("time").get<double>();
    const json& r = j.at("robot");
    s.q = r.at("q").get<std::vector<double>>();
    s.qdot = r.at("qdot").get<std::vector<double>>();
    s.robot = capsules_from(r.at("capsules"));
    const json& h = j.at("human");
    s.human = capsules_from(h.at("capsules"));
    s.right_wrist = vec_from(h.at("right_wrist"));
    s.human_model = h.at("model").get<std::string>();
    s.human_phase = h.at("phase").get<std::string>();
    s.wrist_override = h.at("wrist_override").get<bool>();
    for (const auto& b : j.at("blocks").at("positions"))
      s.blocks.push_back(vec_from(b));
    s.inserted = j.at("blocks").at("inserted").get<std::vector<bool>>();
    const json& c = j.at("container");
    s.container_position = vec_from(c.at("position"));
    const json& o = c.at("orientation");
    s.container_orientation = Quat(o.at(0).get<double>(), o.at(1).get<double>(),
                                   o.at(2).get<double>(), o.at(3).get<double>());
    s.displayed_surface = c.at("displayed_surface").get<int>();
    const json& sf = j.at("safety");
    s.distance = sf.at("D").get<double>();
    s.distance_rate = sf.at("D_rate").get<double>();
    s.d_min = sf.at("d_min").get<double>();
    s.phi = sf.at("phi").is_null() ? kNoHazardPhi : sf.at("phi").get<double>();
    s.safety_triggered = sf.at("triggered").get<bool>();
    s.emergency = sf.at("emergency").get<bool>();
    s.safety_enabled = sf.at("enabled").get<bool>();
    const json& in = j.at("intention");
    if (!in.at("label").is_null()) s.intention = in.at("label").get<std::string>();
    s.confidence = in.at("confidence").get<double>();
    s.ground_truth = in.at("ground_truth").get<std::string>();
    const json& t = j.at("task");
    s.task_node = t.at("node").get<int>();
    s.completed = t.at("completed").get<std::vector<int>>();
    s.active_surface = t.at("active_surface").get<int>();
    s.finished = t.at("finished").get<bool>();
    const json& g = j.at("goal");
    s.goal_kind = g.at("kind").get<std::string>();
    s.goal_surface = g.at("surface").get<int>();
    s.goal_reached = g.at("reached").get<bool>();
    s.alert = j.at("alert").get<bool>();
    s.mode = j.at("mode").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad snapshot: ") + e.what());
  }
  return s;
}

const char* control_type_name(ControlType t) {
  switch (t) {
    case ControlType::kWristTarget: return "wrist_target";
    case ControlType::kRelease: return "release";
    case ControlType::kMode: return "mode";
    case ControlType::kSafety: return "safety";
    case ControlType::kReset: return "reset";
    case ControlType::kHumanModel: return "human_model";
  }
  return "?";
}

std::string control_to_json(const ControlMessage& m) {
  json j = {{"schema", kStreamSchema}, {"type", control_type_name(m.type)}};
  switch (m.type) {
    case ControlType::kWristTarget: j["target"] = vec_json(m.target); break;
    case ControlType::kMode: j["mode"] = mode_name(m.mode); break;
    case ControlType::kSafety: j["enabled"] = m.safety; break;
    case ControlType::kHumanModel: j["index"] = m.human_model; break;
    default: break;
  }
  return j.dump();
}

ControlMessage control_from_json(const std::string& text) {
  const json j = parse_object(text);
  ControlMessage m;
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "wrist_target") {
      m.type = ControlType::kWristTarget;
      m.target = vec_from(j.at("target"));
      if (!m.target.allFinite())
        throw Error(ErrorCode::kParse, "wrist target must be finite");
    } else if (type == "release") {
      m.type = ControlType::kRelease;
    } else if (type == "mode") {
      m.type = ControlType::kMode;
      m.mode = parse_mode(j.at("mode").get<std::string>());
    } else if (type == "safety") {
      m.type = ControlType::kSafety;
      m.safety = j.at("enabled").get<bool>();
    } else if (type == "reset") {
      m.type = ControlType::kReset;
    } else if (type == "human_model") {
      m.type = ControlType::kHumanModel;
      m.human_model = j.at("index").get<int>();
    } else {
      throw Error(ErrorCode::kParse, "unknown control type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad control message: ") + e.what());
  }
  return m;
}

std::string error_to_json(const std::string& message) {
  return json{{"schema", kStreamSchema}, {"type", "error"}, {"message", message}}
      .dump();
}

Session::Session(Scenario scenario, std::optional<MLPParams> model)
    : base_(std::move(scenario)), model_(std::move(model)) {
  base_.validate();
  restart();
}

void Session::restart() {
  sim_ = std::make_unique<Simulation>(base_, model_ ? &*model_ : nullptr);
}

void Session::post(const ControlMessage& message) {
  std::lock_guard<std::mutex> lock(inbox_mutex_);
  inbox_.push_back(message);
}

void Session::apply(const ControlMessage& m) {
  switch (m.type) {
    case ControlType::kWristTarget:
      sim_->set_wrist_override(m.target);
      break;
    case ControlType::kRelease:
      sim_->clear_wrist_override();
      break;
    case ControlType::kMode:
      sim_->set_mode(m.mode);
      break;
    case ControlType::kSafety:
      sim_->set_safety(m.safety);
      break;
    case ControlType::kReset:
      restart();
      break;
    case ControlType::kHumanModel:
      if (m.human_model < 0 ||
          m.human_model >= static_cast<int>(base_.humans.size()))
        throw Error(ErrorCode::kInvalidArgument, "no human model " +
                                                     std::to_string(m.human_model));
      base_.human_index = m.human_model;
      restart();
      break;
  }
}

Snapshot Session::advance() {
  std::deque<ControlMessage> pending;
  {
    std::lock_guard<std::mutex> lock(inbox_mutex_);
    pending.swap(inbox_);
  }
  bool restarted = false;
  for (const auto& m : pending) {
    try {
      apply(m);
    } catch (const Error& e) {
      errors_.push_back(e.what());
      continue;
    }
    restarted = restarted || m.type == ControlType::kReset ||
                m.type == ControlType::kHumanModel;
  }
  // A restart publishes the fresh world at tick 0.
  if (!restarted) sim_->step();
  return make_snapshot(*sim_);
}

std::vector<std::string> Session::drain_errors() {
  std::vector<std::string> out;
  out.swap(errors_);
  return out;
}

Snapshot Session::snapshot() const { return make_snapshot(*sim_); }

}  // namespace hrc
