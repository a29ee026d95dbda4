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

#include "hrc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "hrc/error.hpp"
#include "hrc/human.hpp"

namespace hrc {

using nlohmann::json;

const char* mode_name(Mode m) {
  return m == Mode::kBaseline ? "baseline" : "proactive";
}

Mode parse_mode(const std::string& name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "proactive") return Mode::kProactive;
  throw Error(ErrorCode::kParse, "unknown mode '" + name + "'");
}

const char* posture_name(Posture p) {
  return p == Posture::kConservative ? "conservative" : "proactive";
}

Posture parse_posture(const std::string& name) {
  if (name == "conservative") return Posture::kConservative;
  if (name == "proactive") return Posture::kProactive;
  throw Error(ErrorCode::kParse, "unknown posture '" + name + "'");
}

void HumanModel::validate(const TaskGraph& graph) const {
  int surfaces = 0;
  for (int b : graph.all_blocks())
    surfaces = std::max(surfaces, graph.surface_of_block(b));
  std::vector<int> order = surface_order;
  std::sort(order.begin(), order.end());
  std::vector<int> expect(surfaces);
  std::iota(expect.begin(), expect.end(), 1);
  if (order != expect)
    throw Error(ErrorCode::kInvalidArgument,
                "human '" + name + "' surface order is not a permutation");
  if (static_cast<int>(block_order.size()) != surfaces)
    throw Error(ErrorCode::kInvalidArgument,
                "human '" + name + "' needs one block order per surface");
  for (int s = 1; s <= surfaces; ++s) {
    std::vector<int> got = block_order[s - 1];
    std::sort(got.begin(), got.end());
    std::vector<int> want;
    for (int b : graph.all_blocks())
      if (graph.surface_of_block(b) == s) want.push_back(b);
    if (got != want)
      throw Error(ErrorCode::kInvalidArgument,
                  "human '" + name + "' block order for surface " +
                      std::to_string(s) + " is not a permutation");
  }
  if (!(reach_speed > 0.0) || !(reach_acceleration > 0.0) ||
      !(think_duration >= 0.0) || !(grab_duration > 0.0) ||
      !(insert_duration > 0.0) || noise_sigma < 0.0 || command_latency < 0.0)
    throw Error(ErrorCode::kInvalidArgument,
                "human '" + name + "' needs positive speeds and durations");
}

std::vector<HumanModel> default_human_models(const TaskGraph& graph) {
  int surfaces = 0;
  for (int b : graph.all_blocks())
    surfaces = std::max(surfaces, graph.surface_of_block(b));
  std::vector<std::vector<int>> blocks(surfaces);
  for (int b : graph.all_blocks()) blocks[graph.surface_of_block(b) - 1].push_back(b);

  struct Row {
    const char* name;
    std::vector<int> order;
    bool reverse_blocks;
    double speed, grab, think;
    Posture posture;
  };
  const std::vector<Row> rows = {
      {"worker_a", {1, 2, 3, 4}, false, 0.80, 0.45, 0.40, Posture::kConservative},
      {"worker_b", {2, 1, 4, 3}, true, 0.90, 0.40, 0.35, Posture::kProactive},
      {"worker_c", {4, 3, 2, 1}, false, 0.70, 0.50, 0.45, Posture::kConservative},
      {"worker_d", {3, 1, 4, 2}, true, 0.85, 0.45, 0.40, Posture::kProactive},
      {"worker_e", {1, 3, 2, 4}, false, 0.75, 0.50, 0.40, Posture::kConservative},
  };
  std::vector<HumanModel> out;
  for (const Row& r : rows) {
    HumanModel h;
    h.name = r.name;
    for (int s : r.order)
      if (s <= surfaces) h.surface_order.push_back(s);
    for (int s = static_cast<int>(h.surface_order.size()) + 1; s <= surfaces; ++s)
      h.surface_order.push_back(s);
    h.block_order = blocks;
    if (r.reverse_blocks)
      for (auto& v : h.block_order) std::reverse(v.begin(), v.end());
    h.reach_speed = r.speed;
    h.grab_duration = r.grab;
    h.think_duration = r.think;
    h.posture = r.posture;
    out.push_back(std::move(h));
  }
  return out;
}

void Scenario::validate() const {
  arm.validate();
  if (static_cast<int>(blocks.size()) != kNumBlocks)
    throw Error(ErrorCode::kInvalidArgument,
                "scenario needs " + std::to_string(kNumBlocks) + " blocks");
  if (graph.all_blocks().size() != blocks.size())
    throw Error(ErrorCode::kInvalidArgument,
                "task graph and block layout disagree on the block count");
  workspace.validate();
  int surfaces = 0;
  for (int b : graph.all_blocks())
    surfaces = std::max(surfaces, graph.surface_of_block(b));
  if (static_cast<int>(workspace.display_poses.size()) < surfaces)
    throw Error(ErrorCode::kInvalidArgument,
                "workspace needs one display pose per surface");
  if (humans.empty() || human_index < 0 ||
      human_index >= static_cast<int>(humans.size()))
    throw Error(ErrorCode::kInvalidArgument, "human model index out of range");
  for (const auto& h : humans) h.validate(graph);
  for (const char* part : kHumanParts) safety_spec.avoid(part);
  if (home.size() != arm.link_count() || !arm.within_limits(home))
    throw Error(ErrorCode::kInvalidArgument,
                "home configuration does not fit the arm");
  if (!(dt > 0.0) || !(duration_cap > 0.0) || !(motion_time_min > 0.0) ||
      motion_time_max < motion_time_min || smoothing_window < 1)
    throw Error(ErrorCode::kInvalidArgument, "invalid scenario timing");
  planner.validate();
  safety.validate();
  default_policy_table(graph).validate(graph);
}

Pose display_pose(const Scenario& s, int surface) {
  if (surface < 1 ||
      surface > static_cast<int>(s.workspace.display_poses.size()))
    throw Error(ErrorCode::kInvalidArgument,
                "no display pose for surface " + std::to_string(surface));
  return s.workspace.display_poses[surface - 1];
}

Pose container_pose(const Scenario& s, const Pose& tool) {
  Pose p;
  p.orientation = tool.orientation;
  p.position = tool.position + tool.orientation * Vec3(0.0, 0.0, s.container.drop);
  return p;
}

Vec3 insertion_point(const Scenario& s, const Pose& tool) {
  return container_pose(s, tool).position + s.container.insertion_offset;
}

namespace {

constexpr double kSpinsDeg[] = {-72.0, -24.0, 24.0, 72.0};

Workspace default_workspace(int surfaces, const Vec3& position) {
  Workspace w;
  for (int i = 0; i < surfaces; ++i) {
    const double spin = kSpinsDeg[i % 4] * M_PI / 180.0;
    Pose p;
    p.position = position;
    // Tool axis pointing down, turned about the vertical.
    p.orientation = Quat(Eigen::AngleAxisd(spin, Vec3::UnitZ()) *
                         Eigen::AngleAxisd(M_PI, Vec3::UnitY()));
    w.display_poses.push_back(p);
  }
  return w;
}

// Three blocks per cluster, clusters fanned out in front of the resting hand.
std::vector<Vec3> default_blocks(const Vec3& rest) {
  const double cluster_deg[] = {60.0, 20.0, -20.0, -60.0};
  const double offset_deg[] = {-12.0, 0.0, 12.0};
  const double radius[] = {0.27, 0.35, 0.27};
  std::vector<Vec3> out;
  for (double c : cluster_deg) {
    for (int k = 0; k < 3; ++k) {
      const double a = (c + offset_deg[k]) * M_PI / 180.0;
      out.emplace_back(rest.x() - radius[k] * std::cos(a),
                       rest.y() + radius[k] * std::sin(a), 0.04);
    }
  }
  return out;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::kParse, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json quat_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

Quat quat_from(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw Error(ErrorCode::kParse, "expected a quaternion [w, x, y, z]");
  return Quat(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>());
}

json pose_json(const Pose& p) {
  return {{"position", vec_json(p.position)},
          {"orientation", quat_json(p.orientation)}};
}

Pose pose_from(const json& j) {
  return {vec_from(j.at("position")), quat_from(j.at("orientation"))};
}

json joints_json(const JointVector& q) {
  return json(std::vector<double>(q.data(), q.data() + q.size()));
}

JointVector joints_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const JointVector>(v.data(), static_cast<int>(v.size()));
}

json capsule_json(const Capsule& c) {
  return {{"a", vec_json(c.a)}, {"b", vec_json(c.b)}, {"radius", c.radius}};
}

Capsule capsule_from(const json& j) {
  return {vec_from(j.at("a")), vec_from(j.at("b")), j.at("radius").get<double>()};
}

json arm_json(const ArmModel& m) {
  json joints = json::array();
  for (const Joint& jt : m.joints) {
    joints.push_back({{"name", jt.name},
                      {"axis", vec_json(jt.axis)},
                      {"offset", vec_json(jt.offset)},
                      {"link", capsule_json(jt.link)},
                      {"lower", jt.lower},
                      {"upper", jt.upper},
                      {"max_velocity", jt.max_velocity},
                      {"max_acceleration", jt.max_acceleration}});
  }
  Pose base;
  base.position = m.base.translation();
  base.orientation = Quat(m.base.rotation());
  return {{"base", pose_json(base)},
          {"joints", joints},
          {"tool_offset", vec_json(m.tool_offset)}};
}

ArmModel arm_from(const json& j) {
  ArmModel m;
  const Pose base = pose_from(j.at("base"));
  m.base = Eigen::Isometry3d::Identity();
  m.base.translate(base.position);
  m.base.rotate(base.orientation.normalized());
  for (const auto& jj : j.at("joints")) {
    Joint jt;
    jt.name = jj.at("name").get<std::string>();
    jt.axis = vec_from(jj.at("axis"));
    jt.offset = vec_from(jj.at("offset"));
    jt.link = capsule_from(jj.at("link"));
    jt.lower = jj.at("lower").get<double>();
    jt.upper = jj.at("upper").get<double>();
    jt.max_velocity = jj.at("max_velocity").get<double>();
    jt.max_acceleration = jj.at("max_acceleration").get<double>();
    m.joints.push_back(jt);
  }
  m.tool_offset = vec_from(j.at("tool_offset"));
  return m;
}

json graph_json(const TaskGraph& g) {
  json nodes = json::array();
  for (const TaskNode& n : g.nodes())
    nodes.push_back({{"id", n.id},
                     {"level", n.level},
                     {"surface", n.surface},
                     {"blocks", std::vector<int>(n.blocks.begin(), n.blocks.end())}});
  json edges = json::array();
  for (const TaskEdge& e : g.edges())
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"block", e.block},
                     {"connector", e.connector == Connector::kAnd ? "AND" : "OR"},
                     {"group", e.group}});
  return {{"root", g.root()}, {"nodes", nodes}, {"edges", edges}};
}

TaskGraph graph_from(const json& j) {
  std::vector<TaskNode> nodes;
  for (const auto& n : j.at("nodes")) {
    TaskNode t;
    t.id = n.at("id").get<int>();
    t.level = n.at("level").get<int>();
    t.surface = n.at("surface").get<int>();
    const auto b = n.at("blocks").get<std::vector<int>>();
    t.blocks = std::set<int>(b.begin(), b.end());
    nodes.push_back(std::move(t));
  }
  std::vector<TaskEdge> edges;
  for (const auto& e : j.at("edges")) {
    TaskEdge t;
    t.from = e.at("from").get<int>();
    t.to = e.at("to").get<int>();
    t.block = e.at("block").get<int>();
    const auto c = e.at("connector").get<std::string>();
    if (c != "AND" && c != "OR")
      throw Error(ErrorCode::kParse, "unknown connector '" + c + "'");
    t.connector = c == "AND" ? Connector::kAnd : Connector::kOr;
    t.group = e.at("group").get<int>();
    edges.push_back(t);
  }
  return TaskGraph(std::move(nodes), std::move(edges), j.at("root").get<int>());
}

json body_json(const HumanBody& b) {
  return {{"torso_position", vec_json(b.torso_position)},
          {"torso_height", b.torso_height},
          {"torso_radius", b.torso_radius},
          {"pelvis_half_width", b.pelvis_half_width},
          {"pelvis_radius", b.pelvis_radius},
          {"neck_length", b.neck_length},
          {"neck_radius", b.neck_radius},
          {"head_length", b.head_length},
          {"head_radius", b.head_radius},
          {"shoulder_half_width", b.shoulder_half_width},
          {"upper_arm", b.upper_arm},
          {"forearm", b.forearm},
          {"hand", b.hand},
          {"arm_radius", b.arm_radius},
          {"hand_radius", b.hand_radius},
          {"right_rest", vec_json(b.right_rest)},
          {"left_rest", vec_json(b.left_rest)},
          {"lean_offset", vec_json(b.lean_offset)},
          {"lean_distance", b.lean_distance}};
}

HumanBody body_from(const json& j) {
  HumanBody b;
  b.torso_position = vec_from(j.at("torso_position"));
  b.torso_height = j.at("torso_height").get<double>();
  b.torso_radius = j.at("torso_radius").get<double>();
  b.pelvis_half_width = j.at("pelvis_half_width").get<double>();
  b.pelvis_radius = j.at("pelvis_radius").get<double>();
  b.neck_length = j.at("neck_length").get<double>();
  b.neck_radius = j.at("neck_radius").get<double>();
  b.head_length = j.at("head_length").get<double>();
  b.head_radius = j.at("head_radius").get<double>();
  b.shoulder_half_width = j.at("shoulder_half_width").get<double>();
  b.upper_arm = j.at("upper_arm").get<double>();
  b.forearm = j.at("forearm").get<double>();
  b.hand = j.at("hand").get<double>();
  b.arm_radius = j.at("arm_radius").get<double>();
  b.hand_radius = j.at("hand_radius").get<double>();
  b.right_rest = vec_from(j.at("right_rest"));
  b.left_rest = vec_from(j.at("left_rest"));
  b.lean_offset = vec_from(j.at("lean_offset"));
  b.lean_distance = j.at("lean_distance").get<double>();
  return b;
}

json human_json(const HumanModel& h) {
  return {{"name", h.name},
          {"surface_order", h.surface_order},
          {"block_order", h.block_order},
          {"reach_speed", h.reach_speed},
          {"reach_acceleration", h.reach_acceleration},
          {"think_duration", h.think_duration},
          {"grab_duration", h.grab_duration},
          {"insert_duration", h.insert_duration},
          {"noise_sigma", h.noise_sigma},
          {"posture", posture_name(h.posture)},
          {"command_latency", h.command_latency}};
}

HumanModel human_from(const json& j) {
  HumanModel h;
  h.name = j.at("name").get<std::string>();
  h.surface_order = j.at("surface_order").get<std::vector<int>>();
  h.block_order = j.at("block_order").get<std::vector<std::vector<int>>>();
  h.reach_speed = j.at("reach_speed").get<double>();
  h.reach_acceleration = j.at("reach_acceleration").get<double>();
  h.think_duration = j.at("think_duration").get<double>();
  h.grab_duration = j.at("grab_duration").get<double>();
  h.insert_duration = j.at("insert_duration").get<double>();
  h.noise_sigma = j.at("noise_sigma").get<double>();
  h.posture = parse_posture(j.at("posture").get<std::string>());
  h.command_latency = j.at("command_latency").get<double>();
  return h;
}

}  // namespace

Scenario default_scenario() {
  Scenario s;
  s.arm = default_arm_model();
  s.arm.base.translation() = Vec3(-0.15, 0.0, 0.0);
  s.safety_spec = default_safety_spec();
  s.graph = build_surface_graph(4, 3);
  s.blocks = default_blocks(s.body.right_rest);
  s.workspace = default_workspace(4, Vec3(0.42, 0.0, 0.42));
  s.humans = default_human_models(s.graph);
  s.home = JointVector(6);
  s.home << 0.0, -0.6, 0.0, 1.9, 0.0, 0.9;
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json safety_flags = json::object();
  std::map<std::string, ContactPolicy> sorted(s.safety_spec.flags().begin(),
                                              s.safety_spec.flags().end());
  for (const auto& [label, p] : sorted)
    safety_flags[label] = p == ContactPolicy::kAvoid ? "avoid" : "allow";
  json blocks = json::array();
  for (const Vec3& b : s.blocks) blocks.push_back(vec_json(b));
  json displays = json::array();
  for (const Pose& p : s.workspace.display_poses) displays.push_back(pose_json(p));
  json humans = json::array();
  for (const auto& h : s.humans) humans.push_back(human_json(h));

  json j = {
      {"format", "hrc-scenario 1"},
      {"seed", s.seed},
      {"mode", mode_name(s.mode)},
      {"safety_enabled", s.safety_enabled},
      {"dt", s.dt},
      {"duration_cap", s.duration_cap},
      {"arm", arm_json(s.arm)},
      {"home", joints_json(s.home)},
      {"safety_spec", safety_flags},
      {"task_graph", graph_json(s.graph)},
      {"blocks", blocks},
      {"display_poses", displays},
      {"container",
       {{"drop", s.container.drop},
        {"half_size", s.container.half_size},
        {"insertion_offset", vec_json(s.container.insertion_offset)},
        {"staging_offset", vec_json(s.container.staging_offset)}}},
      {"body", body_json(s.body)},
      {"humans", humans},
      {"human_index", s.human_index},
      {"robot",
       {{"motion_time_min", s.motion_time_min},
        {"motion_time_max", s.motion_time_max},
        {"settle_tolerance", s.settle_tolerance},
        {"wrong_surface_patience", s.wrong_surface_patience},
        {"smoothing_window", s.smoothing_window}}},
      {"planner",
       {{"horizon", s.planner.horizon},
        {"goal_weight", s.planner.goal_weight},
        {"d_min", s.planner.d_min},
        {"margin", s.planner.margin},
        {"push_slack", s.planner.push_slack},
        {"max_iterations", s.planner.max_iterations},
        {"tolerance", s.planner.tolerance},
        {"max_push_iterations", s.planner.max_push_iterations}}},
      {"safety",
       {{"d_min", s.safety.d_min},
        {"lambda", s.safety.lambda},
        {"eta", s.safety.eta},
        {"recovery_offset", s.safety.recovery_offset},
        {"u_max", joints_json(s.safety.u_max)}}},
      {"tracking",
       {{"kp", s.gains.kp},
        {"kd", s.gains.kd},
        {"waypoint_tolerance", s.gains.waypoint_tolerance}}},
      {"hazards",
       {{"incursion_speed", s.hazards.incursion_speed},
        {"incursion_start", s.hazards.incursion_start},
        {"incursion_dwell", s.hazards.incursion_dwell},
        {"duration", s.hazards.duration}}},
  };
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("scenario JSON: ") + e.what());
  }
  Scenario s;
  try {
    if (j.value("format", "") != "hrc-scenario 1")
      throw Error(ErrorCode::kParse, "scenario format tag missing or unknown");
    s.seed = j.at("seed").get<std::uint64_t>();
    s.mode = parse_mode(j.at("mode").get<std::string>());
    s.safety_enabled = j.at("safety_enabled").get<bool>();
    s.dt = j.at("dt").get<double>();
    s.duration_cap = j.at("duration_cap").get<double>();
    s.arm = arm_from(j.at("arm"));
    s.home = joints_from(j.at("home"));
    SafetySpec spec;
    for (const auto& [label, v] : j.at("safety_spec").items()) {
      const auto p = v.get<std::string>();
      if (p != "avoid" && p != "allow")
        throw Error(ErrorCode::kParse, "contact policy must be avoid or allow");
      spec.set(label, p == "avoid" ? ContactPolicy::kAvoid : ContactPolicy::kAllow);
    }
    s.safety_spec = spec;
    s.graph = graph_from(j.at("task_graph"));
    s.blocks.clear();
    for (const auto& b : j.at("blocks")) s.blocks.push_back(vec_from(b));
    s.workspace.display_poses.clear();
    for (const auto& p : j.at("display_poses"))
      s.workspace.display_poses.push_back(pose_from(p));
    const auto& c = j.at("container");
    s.container.drop = c.at("drop").get<double>();
    s.container.half_size = c.at("half_size").get<double>();
    s.container.insertion_offset = vec_from(c.at("insertion_offset"));
    s.container.staging_offset = vec_from(c.at("staging_offset"));
    s.body = body_from(j.at("body"));
    s.humans.clear();
    for (const auto& h : j.at("humans")) s.humans.push_back(human_from(h));
    s.human_index = j.at("human_index").get<int>();
    const auto& r = j.at("robot");
    s.motion_time_min = r.at("motion_time_min").get<double>();
    s.motion_time_max = r.at("motion_time_max").get<double>();
    s.settle_tolerance = r.at("settle_tolerance").get<double>();
    s.wrong_surface_patience = r.at("wrong_surface_patience").get<double>();
    s.smoothing_window = r.at("smoothing_window").get<int>();
    const auto& p = j.at("planner");
    s.planner.horizon = p.at("horizon").get<int>();
    s.planner.goal_weight = p.at("goal_weight").get<double>();
    s.planner.d_min = p.at("d_min").get<double>();
    s.planner.margin = p.at("margin").get<double>();
    s.planner.push_slack = p.at("push_slack").get<double>();
    s.planner.max_iterations = p.at("max_iterations").get<int>();
    s.planner.tolerance = p.at("tolerance").get<double>();
    s.planner.max_push_iterations = p.at("max_push_iterations").get<int>();
    const auto& sf = j.at("safety");
    s.safety.d_min = sf.at("d_min").get<double>();
    s.safety.lambda = sf.at("lambda").get<double>();
    s.safety.eta = sf.at("eta").get<double>();
    s.safety.recovery_offset = sf.at("recovery_offset").get<double>();
    s.safety.u_max = joints_from(sf.at("u_max"));
    s.safety.dt = s.dt;
    const auto& t = j.at("tracking");
    s.gains.kp = t.at("kp").get<double>();
    s.gains.kd = t.at("kd").get<double>();
    s.gains.waypoint_tolerance = t.at("waypoint_tolerance").get<double>();
    const auto& hz = j.at("hazards");
    s.hazards.incursion_speed = hz.at("incursion_speed").get<double>();
    s.hazards.incursion_start = hz.at("incursion_start").get<double>();
    s.hazards.incursion_dwell = hz.at("incursion_dwell").get<double>();
    s.hazards.duration = hz.at("duration").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("scenario JSON: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write scenario file '" + path + "'");
  out << scenario_to_json(s);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace hrc
