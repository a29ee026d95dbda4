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


#ifndef HRC_EXPERIMENTS_HPP_
#define HRC_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hrc/sim.hpp"

namespace hrc {

// Demonstration data, held-out data and the training recipe.
struct TrainSetup {
  std::vector<int> train_humans = {0, 1};
  int train_trials = 2;
  std::uint64_t train_data_seed = 1;
  std::vector<int> heldout_humans = {0, 1};
  int heldout_trials = 1;
  std::uint64_t heldout_data_seed = 2;
  TrainParams train;
  AttackParams attack;
  int iada_rounds = 0;  // 0 = plain training
};

struct TrainOutcome {
  MLPParams model;
  std::size_t train_size = 0;  // after augmentation
  std::size_t heldout_size = 0;
  double clean_accuracy = 0.0;        // held-out
  double adversarial_accuracy = 0.0;  // held-out, attacked
  int verified = 0;  // adversaries labeled by the expert oracle
  int pseudo = 0;    // adversaries labeled by the model
};

TrainOutcome train_intention_model(const Scenario& scenario,
                                   const TrainSetup& setup);

struct Stat {
  double avg = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for fewer than 2 values
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

Stat describe(const std::vector<double>& values);

struct ModeTimes {
  std::vector<double> task, surface, block;
};

// Baseline against proactive on the same seeds. Seed k uses human model
// (k - 1) mod the number of models.
struct Comparison {
  std::vector<std::uint64_t> seeds;
  ModeTimes baseline, proactive;
  std::vector<double> leads;  // proactive runs
  int reaches = 0;
  int unrecognized = 0;
  int min_distance_violations = 0;  // ticks are not counted, runs with D <= 0
};

using RunSink = std::function<void(Mode, std::uint64_t seed, const MetricsLog&)>;

int human_for_seed(const Scenario& scenario, std::uint64_t seed);

Comparison compare_modes(const Scenario& scenario, const MLPParams& model,
                         const std::vector<std::uint64_t>& seeds,
                         const RunSink& sink = nullptr);

// 1 - proactive / baseline mean task time.
double task_reduction(const Comparison& c);

std::string comparison_to_json(const Comparison& c);

struct SuiteEntry {
  Hazard hazard = Hazard::kNone;
  Posture posture = Posture::kConservative;
  bool safety = true;
  int human = 0;
  std::uint64_t seed = 0;
  double min_distance = kNoAvoidDistance;
  int longest_excursion = 0;
  int safety_ticks = 0;
  int emergency_ticks = 0;
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  int max_recovery_ticks = 10;

  bool safe_with_safety() const;       // D > 0 throughout
  bool recovers() const;               // phi excursions within the limit
  bool penetrates_without_safety() const;
  // Proactive posture triggers more safety ticks than conservative, per
  // human model and seed, with safety on.
  bool posture_ordering() const;
  double min_distance(bool safety) const;
  int longest_excursion(bool safety) const;
};

// Every hazard for every human model and seed, with safety on and off.
SuiteResult safety_suite(const Scenario& scenario,
                         const std::vector<std::uint64_t>& seeds);

std::string suite_to_json(const SuiteResult& r);

}  // namespace hrc

#endif  // HRC_EXPERIMENTS_HPP_
