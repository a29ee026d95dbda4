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


#include <sstream>

#include "doctest.h"
#include "hrc/sim.hpp"

using namespace hrc;

namespace {

const MLPParams& shipped_model() {
  static const MLPParams m = load_model_file(HRC_TEST_MODEL);
  return m;
}

std::string csv_of(const MetricsLog& log) {
  std::ostringstream out;
  write_telemetry_csv(log, out);
  write_events_csv(log, out);
  return out.str();
}

int count_kind(const MetricsLog& log, const std::string& kind) {
  int n = 0;
  for (const Event& e : log.events) n += e.kind == kind;
  return n;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("a proactive run completes every block with consistent accounting") {
  const Scenario s = default_scenario();
  const MetricsLog log = run_scenario(s, &shipped_model());
  CHECK(log.totals.completed);
  CHECK(count_kind(log, "insertion") == 12);
  CHECK(count_kind(log, "surface_complete") == 4);
  CHECK(count_kind(log, "task_complete") == 1);
  CHECK(log.totals.block_times.size() == 12);
  CHECK(log.totals.surface_times.size() == 4);
  CHECK(log.totals.first_block_times.size() == 4);
  double sum = 0.0;
  for (double t : log.totals.surface_times) sum += t;
  CHECK(sum == doctest::Approx(log.totals.task_time).epsilon(1e-9));
  sum = 0.0;
  for (double t : log.totals.block_times) sum += t;
  CHECK(sum <= log.totals.task_time + 1e-9);
  CHECK(log.predict_calls > 0);
  CHECK(log.min_distance > 0.0);
  const Totals again = totals_from_events(log.events, s.graph);
  CHECK(again.task_time == log.totals.task_time);
  CHECK(again.block_times == log.totals.block_times);
}

TEST_CASE("insertions fold into a terminal node of the task graph") {
  const Scenario s = default_scenario();
  const MetricsLog log = run_scenario(s, &shipped_model());
  TaskState st = state_of(s.graph, s.graph.root());
  for (const Event& e : log.events)
    if (e.kind == "insertion") st = advance(s.graph, st, InsertionEvent{std::stoi(e.detail), e.time});
  const auto terms = s.graph.terminals();
  CHECK(std::find(terms.begin(), terms.end(), st.node) != terms.end());
  CHECK(st.completed == s.graph.all_blocks());
}

TEST_CASE("runs are deterministic for a fixed seed") {
  Scenario s = default_scenario();
  s.seed = 11;
  CHECK(csv_of(run_scenario(s, &shipped_model())) ==
        csv_of(run_scenario(s, &shipped_model())));
  s.mode = Mode::kBaseline;
  CHECK(csv_of(run_scenario(s, nullptr)) == csv_of(run_scenario(s, nullptr)));
}

TEST_CASE("different seeds give different runs") {
  Scenario a = default_scenario(), b = default_scenario();
  a.seed = 1;
  b.seed = 2;
  CHECK(csv_of(run_scenario(a, &shipped_model())) !=
        csv_of(run_scenario(b, &shipped_model())));
}

TEST_CASE("the baseline never queries the classifier") {
  Scenario s = default_scenario();
  s.mode = Mode::kBaseline;
  const MetricsLog log = run_scenario(s, &shipped_model());
  CHECK(log.totals.completed);
  CHECK(log.predict_calls == 0);
  CHECK(count_kind(log, "insertion") == 12);
}

TEST_CASE("proactive mode without a model is rejected") {
  Scenario s = default_scenario();
  CHECK_THROWS_AS(Simulation(s, nullptr), Error);
}

TEST_CASE("the duration cap raises a timeout carrying the partial log") {
  Scenario s = default_scenario();
  s.duration_cap = 5.0;
  try {
    run_scenario(s, &shipped_model());
    FAIL("expected a timeout");
  } catch (const SimulationTimeout& e) {
    CHECK(e.code() == ErrorCode::kTimeout);
    CHECK_FALSE(e.partial().telemetry.empty());
    CHECK_FALSE(e.partial().totals.completed);
    CHECK(e.partial().telemetry.back().time <= 5.0 + s.dt + 1e-9);
  }
}

TEST_CASE("stepping a finished simulation changes nothing") {
  Scenario s = default_scenario();
  Simulation sim(s, &shipped_model());
  sim.run();
  REQUIRE(sim.finished());
  const long tick = sim.tick();
  const JointVector q = sim.robot().q;
  for (int k = 0; k < 10; ++k) sim.step();
  CHECK(sim.tick() == tick);
  CHECK(sim.robot().q == q);
}

TEST_CASE("telemetry CSV has one row per tick and a fixed header") {
  Scenario s = default_scenario();
  SimOptions opt;
  opt.stop_after_insertions = 1;
  const MetricsLog log = run_scenario(s, &shipped_model(), opt);
  std::ostringstream out;
  write_telemetry_csv(log, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("time,q1,", 0) == 0);
  CHECK(line.find(",D,Ddot,phi,safety_triggered,emergency") != std::string::npos);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == log.telemetry.size());
  CHECK(count_kind(log, "insertion") == 1);
}

TEST_CASE("the scripted hazards trip the safety layer and keep D positive") {
  Scenario s = default_scenario();
  for (Hazard h : {Hazard::kLeftIncursion, Hazard::kEarlyReach}) {
    SimOptions opt;
    opt.hazard = h;
    const MetricsLog log = run_scenario(s, &shipped_model(), opt);
    if (h == Hazard::kLeftIncursion) CHECK(log.safety_ticks > 0);
    CHECK(log.min_distance > 0.0);
    CHECK(log.longest_phi_excursion <= 10);
  }
}

TEST_CASE("scenario JSON round trip") {
  const Scenario s = default_scenario();
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(scenario_to_json(back) == scenario_to_json(s));
  CHECK_THROWS_AS(scenario_from_json("{"), Error);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), Error);
}

TEST_CASE("expert labels agree with the scripted ground truth during reaches") {
  Scenario s = default_scenario();
  Simulation sim(s, &shipped_model());
  int agree = 0, total = 0;
  while (!sim.finished() && sim.time() < 30.0) {
    sim.step();
    if (sim.human().phase != HumanPhase::kReach) continue;
    const auto e = expert_label(sim.features(), s.dt);
    if (!e) continue;
    ++total;
    agree += *e == sim.ground_truth();
  }
  REQUIRE(total > 20);
  CHECK(agree >= 0.8 * total);
}

}  // TEST_SUITE
