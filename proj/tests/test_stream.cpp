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


#include "json.hpp"

#include "doctest.h"
#include "hrc/stream.hpp"

using namespace hrc;
using nlohmann::json;

namespace {

const MLPParams& shipped_model() {
  static const MLPParams m = load_model_file(HRC_TEST_MODEL);
  return m;
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("snapshot JSON round trip") {
  Session session(default_scenario(), shipped_model());
  for (int k = 0; k < 45; ++k) session.advance();
  const Snapshot s = session.snapshot();
  const std::string text = snapshot_to_json(s);
  CHECK(snapshot_from_json(text) == s);
  const json j = json::parse(text);
  CHECK(j["schema"] == kStreamSchema);
  CHECK(j["type"] == "snapshot");
  CHECK(j["tick"] == 45);
  CHECK(j["robot"]["q"].size() == 6);
  CHECK(j["robot"]["capsules"].size() == 6);
  CHECK(j["blocks"]["positions"].size() == 12);
  CHECK(j["container"]["orientation"].size() == 4);
  CHECK(j["safety"]["d_min"] == 0.35);
}

TEST_CASE("a non-finite phi travels as null") {
  Snapshot s;
  s.mode = "proactive";
  const json j = json::parse(snapshot_to_json(s));
  CHECK(j["safety"]["phi"].is_null());
  CHECK(j["intention"]["label"].is_null());
  const Snapshot back = snapshot_from_json(j.dump());
  CHECK(back.phi == kNoHazardPhi);
  CHECK_FALSE(back.intention.has_value());
}

TEST_CASE("control messages round trip") {
  std::vector<ControlMessage> all(6);
  all[0].type = ControlType::kWristTarget;
  all[0].target = Vec3(0.7, 0.1, 0.2);
  all[1].type = ControlType::kRelease;
  all[2].type = ControlType::kMode;
  all[2].mode = Mode::kBaseline;
  all[3].type = ControlType::kSafety;
  all[3].safety = false;
  all[4].type = ControlType::kReset;
  all[5].type = ControlType::kHumanModel;
  all[5].human_model = 3;
  for (const ControlMessage& m : all) CHECK(control_from_json(control_to_json(m)) == m);
}

TEST_CASE("malformed control messages are parse errors") {
  const std::string s = std::string("\"schema\":\"") + kStreamSchema + "\"";
  for (const std::string& bad :
       {std::string("not json"), std::string("{\"type\":\"reset\"}"),
        "{" + s + ",\"type\":\"fly\"}", "{" + s + ",\"type\":\"wrist_target\"}",
        "{" + s + ",\"type\":\"wrist_target\",\"target\":[1,2]}",
        "{" + s + ",\"type\":\"mode\",\"mode\":\"turbo\"}",
        std::string("{\"schema\":\"hrc.stream/0\",\"type\":\"reset\"}")}) {
    CAPTURE(bad);
    try {
      control_from_json(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
  }
  const json e = json::parse(error_to_json("boom"));
  CHECK(e["type"] == "error");
  CHECK(e["message"] == "boom");
}

TEST_CASE("a wrist target moves the wrist on the following ticks") {
  Session session(default_scenario(), shipped_model());
  for (int k = 0; k < 5; ++k) session.advance();
  const Vec3 before = session.snapshot().right_wrist;
  ControlMessage m;
  m.type = ControlType::kWristTarget;
  m.target = before + Vec3(-0.2, 0.0, 0.1);
  session.post(m);
  Snapshot s = session.advance();
  CHECK(s.wrist_override);
  for (int k = 0; k < 60; ++k) s = session.advance();
  CHECK((s.right_wrist - m.target).norm() < (before - m.target).norm());
  CHECK((s.right_wrist - m.target).norm() < 0.05);
  m.type = ControlType::kRelease;
  session.post(m);
  CHECK_FALSE(session.advance().wrist_override);
}

TEST_CASE("reset returns to tick zero and equals a fresh session") {
  Session a(default_scenario(), shipped_model());
  Session fresh(default_scenario(), shipped_model());
  for (int k = 0; k < 90; ++k) a.advance();
  ControlMessage m;
  m.type = ControlType::kReset;
  a.post(m);
  const Snapshot s = a.advance();
  CHECK(s.tick == 0);
  CHECK(s == fresh.snapshot());
  CHECK(a.advance() == fresh.advance());
}

TEST_CASE("switching the human model restarts with that model") {
  Scenario sc = default_scenario();
  Session session(sc, shipped_model());
  ControlMessage m;
  m.type = ControlType::kHumanModel;
  m.human_model = 2;
  session.post(m);
  const Snapshot s = session.advance();
  CHECK(s.tick == 0);
  CHECK(s.human_model == sc.humans[2].name);
}

TEST_CASE("rejected messages are collected, the rest still apply") {
  Scenario sc = default_scenario();
  sc.mode = Mode::kBaseline;
  Session session(sc, std::nullopt);
  ControlMessage bad;
  bad.type = ControlType::kMode;
  bad.mode = Mode::kProactive;
  ControlMessage off;
  off.type = ControlType::kSafety;
  off.safety = false;
  ControlMessage nobody;
  nobody.type = ControlType::kHumanModel;
  nobody.human_model = 99;
  session.post(bad);
  session.post(off);
  session.post(nobody);
  const Snapshot s = session.advance();
  CHECK(s.tick == 1);
  CHECK_FALSE(s.safety_enabled);
  CHECK(s.mode == "baseline");
  const auto errors = session.drain_errors();
  REQUIRE(errors.size() == 2);
  CHECK(errors[0].find("model") != std::string::npos);
  CHECK(session.drain_errors().empty());
}

TEST_CASE("ticks advance by one and time by dt") {
  const Scenario sc = default_scenario();
  Session session(sc, shipped_model());
  for (int k = 1; k <= 20; ++k) {
    const Snapshot s = session.advance();
    CHECK(s.tick == k);
    CHECK(s.time == doctest::Approx(k * sc.dt));
  }
}

}  // TEST_SUITE
