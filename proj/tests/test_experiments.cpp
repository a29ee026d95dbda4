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


#include <cmath>
#include "json.hpp"

#include "doctest.h"
#include "hrc/experiments.hpp"

using namespace hrc;
using nlohmann::json;

TEST_SUITE("experiments") {

TEST_CASE("describe computes the sample statistics") {
  const Stat s = describe({2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(s.avg == doctest::Approx(5.0));
  CHECK(s.std == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(s.min == 2.0);
  CHECK(s.max == 9.0);
  CHECK(s.count == 8);
  CHECK(describe({3.0}).std == 0.0);
  CHECK(describe({}).count == 0);
}

TEST_CASE("seeds cycle through the human models") {
  const Scenario s = default_scenario();
  const int n = static_cast<int>(s.humans.size());
  for (std::uint64_t k = 1; k <= 12; ++k)
    CHECK(human_for_seed(s, k) == static_cast<int>((k - 1) % n));
}

TEST_CASE("a two-seed comparison fills every cell") {
  const Scenario s = default_scenario();
  const MLPParams model = load_model_file(HRC_TEST_MODEL);
  int sunk = 0;
  const Comparison c = compare_modes(s, model, {1, 2},
                                     [&](Mode, std::uint64_t, const MetricsLog& log) {
                                       ++sunk;
                                       CHECK(log.totals.completed);
                                     });
  CHECK(sunk == 4);
  CHECK(c.baseline.task.size() == 2);
  CHECK(c.proactive.surface.size() == 8);
  CHECK(c.proactive.block.size() == 8);
  const json j = json::parse(comparison_to_json(c));
  int cells = 0;
  for (const char* mode : {"baseline", "proactive"})
    for (const char* level : {"task", "surface", "block"}) {
      const json& cell = j[mode][level];
      for (const char* key : {"avg", "std", "min", "max"}) {
        CHECK(cell[key].is_number());
        ++cells;
      }
      CHECK(cell["std"].get<double>() >= 0.0);
      CHECK(cell["min"].get<double>() <= cell["avg"].get<double>());
      CHECK(cell["avg"].get<double>() <= cell["max"].get<double>());
    }
  CHECK(cells == 24);
  CHECK(j["reduction"]["task"].get<double>() == doctest::Approx(task_reduction(c)));
  CHECK(task_reduction(c) ==
        doctest::Approx(1.0 - describe(c.proactive.task).avg / describe(c.baseline.task).avg));
}

TEST_CASE("suite verdicts follow the entries") {
  SuiteResult r;
  SuiteEntry on;
  on.min_distance = 0.2;
  on.longest_excursion = 4;
  SuiteEntry off = on;
  off.safety = false;
  off.min_distance = -0.05;
  r.entries = {on, off};
  CHECK(r.safe_with_safety());
  CHECK(r.recovers());
  CHECK(r.penetrates_without_safety());
  CHECK(r.min_distance(true) == 0.2);
  r.entries[0].longest_excursion = 11;
  CHECK_FALSE(r.recovers());
  r.entries[1].min_distance = 0.1;
  CHECK_FALSE(r.penetrates_without_safety());
  const json j = json::parse(suite_to_json(r));
  CHECK(j["runs"].size() == 2);
  CHECK(j["checks"]["phi_recovers_within_ticks"] == false);
}

}  // TEST_SUITE
