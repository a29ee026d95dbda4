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


#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "hrc/task_graph.hpp"

using namespace hrc;

using namespace hrc::oracle;

TEST_SUITE("task_graph") {

TEST_CASE("no observations select the root") {
  const TaskGraph g = build_surface_graph(4, 3);
  const ProgressEstimate p = infer_progress(g, {});
  CHECK(p.state.node == g.root());
  CHECK(p.state.completed.empty());
  CHECK(p.posterior == 1.0);
}

TEST_CASE("three blocks of surface one close the surface") {
  const TaskGraph g = build_surface_graph(4, 3);
  const ProgressEstimate p = infer_progress(g, to_obs({1, 2, 3}));
  CHECK(p.state.completed == std::set<int>{1, 2, 3});
  CHECK(p.state.active_surface == 0);
  CHECK(g.depth(p.state.node) == 3);
}

TEST_CASE("graph shape: 12 blocks, surfaces in any order") {
  const TaskGraph g = build_surface_graph(4, 3);
  CHECK(g.all_blocks().size() == 12);
  CHECK(g.terminals().size() == 1);
  for (int b = 1; b <= 12; ++b) CHECK(g.surface_of_block(b) == (b - 1) / 3 + 1);
  for (const TaskNode& n : g.nodes())
    if (n.blocks.size() < 12) CHECK_FALSE(g.out_edges(n.id).empty());
}

TEST_CASE("inference matches path enumeration exhaustively at 4x2") {
  const TaskGraph g = build_surface_graph(4, 2);
  const PathOracle oracle(g);
  const auto seqs = all_sequences(4, 2);
  CHECK(seqs.size() == 24 * 16);
  int checked = 0;
  for (const auto& full : seqs) {
    for (size_t k = 0; k <= full.size(); ++k) {
      const std::vector<int> prefix(full.begin(), full.begin() + k);
      const ProgressEstimate p = infer_progress(g, to_obs(prefix));
      const auto expect = oracle.best(g, prefix);
      REQUIRE(expect.has_value());
      CHECK(p.state.node == *expect);
      CHECK(p.posterior ==
            doctest::Approx(1.0 / oracle.ends.at(prefix).size()));
      ++checked;
    }
  }
  CHECK(checked == 384 * 9);
}

TEST_CASE("inference matches path enumeration on 10^4 sampled 12-block sequences") {
  const TaskGraph g = build_surface_graph(4, 3);
  const PathOracle oracle(g);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 10000; ++k) {
    const auto full = random_sequence(rng, 4, 3);
    const size_t len = std::uniform_int_distribution<size_t>(0, 12)(rng);
    const std::vector<int> prefix(full.begin(), full.begin() + len);
    const auto expect = oracle.best(g, prefix);
    REQUIRE(expect.has_value());
    CHECK(infer_progress(g, to_obs(prefix)).state.node == *expect);
  }
}

TEST_CASE("inconsistent observations report the consistent prefix") {
  const TaskGraph g = build_surface_graph(4, 3);
  const PathOracle oracle(g);
  std::mt19937_64 rng(22);
  for (int k = 0; k < 500; ++k) {
    std::vector<int> seq = random_sequence(rng, 4, 3);
    std::uniform_int_distribution<int> pick(0, 11);
    std::swap(seq[pick(rng)], seq[pick(rng)]);
    seq.resize(std::uniform_int_distribution<size_t>(1, 12)(rng));
    size_t good = 0;
    while (good < seq.size() &&
           oracle.ends.count(std::vector<int>(seq.begin(), seq.begin() + good + 1)))
      ++good;
    if (good == seq.size()) {
      CHECK_NOTHROW(infer_progress(g, to_obs(seq)));
      continue;
    }
    try {
      infer_progress(g, to_obs(seq));
      FAIL("expected inconsistency");
    } catch (const InconsistentObservation& e) {
      CHECK(e.prefix_length() == static_cast<int>(good));
      CHECK(e.code() == ErrorCode::kInconsistentObservation);
    }
  }
}

TEST_CASE("admissible intentions after surface one are R_4..R_12") {
  const TaskGraph g = build_surface_graph(4, 3);
  const TaskState s = infer_progress(g, to_obs({2, 1, 3})).state;
  std::set<IntentionLabel> expect;
  for (int b = 4; b <= 12; ++b) expect.insert(IntentionLabel::reach(b));
  CHECK(valid_next_intentions(g, s) == expect);
}

TEST_CASE("the terminal state admits nothing and rejects every event") {
  const TaskGraph g = build_surface_graph(4, 3);
  const TaskState s = state_of(g, g.terminals().front());
  CHECK(valid_next_intentions(g, s).empty());
  for (int b = 1; b <= 12; ++b)
    CHECK_THROWS_AS(advance(g, s, {b, 0.0}), Error);
}

TEST_CASE("advance within a surface keeps the surface active") {
  const TaskGraph g = build_surface_graph(4, 3);
  const TaskState s1 = advance(g, state_of(g, g.root()), {1, 0.0});
  const TaskState s2 = advance(g, s1, {2, 1.0});
  CHECK(s2.completed == std::set<int>{1, 2});
  CHECK(s2.active_surface == 1);
  CHECK(valid_next_blocks(g, s2) == std::set<int>{3});
}

TEST_CASE("mid-surface admissible sets match enumeration; inserted blocks excluded") {
  const TaskGraph g = build_surface_graph(4, 3);
  const PathOracle oracle(g);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 300; ++k) {
    const auto full = random_sequence(rng, 4, 3);
    const size_t len = std::uniform_int_distribution<size_t>(0, 12)(rng);
    const std::vector<int> prefix(full.begin(), full.begin() + len);
    const TaskState s = infer_progress(g, to_obs(prefix)).state;
    std::set<IntentionLabel> expect;
    for (int b : oracle.next_blocks(prefix)) expect.insert(IntentionLabel::reach(b));
    CHECK(valid_next_intentions(g, s) == expect);
    for (int b : prefix) CHECK(valid_next_intentions(g, s).count(IntentionLabel::reach(b)) == 0);
  }
}

TEST_CASE("folding advance equals inference") {
  const TaskGraph g = build_surface_graph(4, 3);
  std::mt19937_64 rng(24);
  for (int k = 0; k < 1000; ++k) {
    const auto seq = random_sequence(rng, 4, 3);
    TaskState s = state_of(g, g.root());
    ObservationSeq obs;
    for (int b : seq) {
      obs.push_back({b, 0.0});
      s = advance(g, s, obs.back());
      CHECK(s.node == infer_progress(g, obs).state.node);
    }
  }
}

TEST_CASE("posterior argmax is invariant to rescaling the prior") {
  const TaskGraph g = build_surface_graph(4, 3);
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  NodePrior prior;
  for (const TaskNode& n : g.nodes()) prior[n.id] = w(rng);
  NodePrior scaled = prior;
  for (auto& [id, v] : scaled) v *= 37.5;
  for (int k = 0; k < 200; ++k) {
    const auto full = random_sequence(rng, 4, 3);
    const std::vector<int> prefix(full.begin(), full.begin() + k % 13);
    const auto a = infer_progress(g, to_obs(prefix), prior);
    const auto b = infer_progress(g, to_obs(prefix), scaled);
    CHECK(a.state.node == b.state.node);
    CHECK(a.posterior == doctest::Approx(b.posterior));
    const auto u = infer_progress(g, to_obs(prefix));
    CHECK(u.posterior == doctest::Approx(1.0 / u.consistent_nodes.size()));
  }
}

}  // TEST_SUITE
