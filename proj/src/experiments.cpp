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


#include "hrc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace hrc {

TrainOutcome train_intention_model(const Scenario& scenario,
                                   const TrainSetup& setup) {
  if (setup.iada_rounds < 0)
    throw Error(ErrorCode::kInvalidArgument, "IADA rounds must be >= 0");
  const LabeledDataset data = generate_demos(
      scenario, setup.train_humans, setup.train_trials, setup.train_data_seed);
  const LabeledDataset heldout =
      generate_demos(scenario, setup.heldout_humans, setup.heldout_trials,
                     setup.heldout_data_seed);
  TrainOutcome out;
  if (setup.iada_rounds == 0) {
    out.model = train(data, setup.train);
    out.train_size = data.size();
  } else {
    IadaResult r = iada_train(
        data, setup.attack,
        [](const FeatureVector& x) { return expert_label(x); },
        setup.iada_rounds, setup.train);
    out.model = std::move(r.model);
    out.train_size = r.dataset.size();
    for (int v : r.verified_per_round) out.verified += v;
    for (int p : r.pseudo_per_round) out.pseudo += p;
  }
  out.heldout_size = heldout.size();
  out.clean_accuracy = accuracy(out.model, heldout);
  out.adversarial_accuracy =
      adversarial_accuracy(out.model, heldout, setup.attack);
  return out;
}

Stat describe(const std::vector<double>& v) {
  Stat s;
  s.count = v.size();
  if (v.empty()) return s;
  s.avg = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.avg) * (x - s.avg);
    s.std = std::sqrt(ss / (v.size() - 1));
  }
  return s;
}

int human_for_seed(const Scenario& scenario, std::uint64_t seed) {
  const std::uint64_t n = scenario.humans.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "no human models");
  return static_cast<int>((seed + n - 1) % n);
}

Comparison compare_modes(const Scenario& scenario, const MLPParams& model,
                         const std::vector<std::uint64_t>& seeds,
                         const RunSink& sink) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "no seeds");
  Comparison c;
  c.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    for (Mode mode : {Mode::kBaseline, Mode::kProactive}) {
      Scenario s = scenario;
      s.seed = seed;
      s.human_index = human_for_seed(scenario, seed);
      s.mode = mode;
      const MetricsLog log = run_scenario(s, &model);
      ModeTimes& t = mode == Mode::kBaseline ? c.baseline : c.proactive;
      t.task.push_back(log.totals.task_time);
      t.surface.insert(t.surface.end(), log.totals.surface_times.begin(),
                       log.totals.surface_times.end());
      t.block.insert(t.block.end(), log.totals.first_block_times.begin(),
                     log.totals.first_block_times.end());
      if (log.min_distance <= 0.0) ++c.min_distance_violations;
      if (mode == Mode::kProactive) {
        c.leads.insert(c.leads.end(), log.recognition_leads.begin(),
                       log.recognition_leads.end());
        c.reaches += log.reaches;
        c.unrecognized +=
            log.reaches - static_cast<int>(log.recognition_leads.size());
      }
      if (sink) sink(mode, seed, log);
    }
  }
  return c;
}

double task_reduction(const Comparison& c) {
  const double b = describe(c.baseline.task).avg;
  return b > 0.0 ? 1.0 - describe(c.proactive.task).avg / b : 0.0;
}

namespace {

nlohmann::json stat_json(const Stat& s) {
  return {{"avg", s.avg}, {"std", s.std}, {"min", s.min}, {"max", s.max},
          {"n", s.count}};
}

nlohmann::json times_json(const ModeTimes& t) {
  return {{"task", stat_json(describe(t.task))},
          {"surface", stat_json(describe(t.surface))},
          {"block", stat_json(describe(t.block))}};
}

}  // namespace

std::string comparison_to_json(const Comparison& c) {
  auto rel = [](const std::vector<double>& b, const std::vector<double>& p) {
    const double mb = describe(b).avg;
    return mb > 0.0 ? 1.0 - describe(p).avg / mb : 0.0;
  };
  nlohmann::json j = {
      {"seeds", c.seeds},
      {"baseline", times_json(c.baseline)},
      {"proactive", times_json(c.proactive)},
      {"reduction",
       {{"task", rel(c.baseline.task, c.proactive.task)},
        {"surface", rel(c.baseline.surface, c.proactive.surface)},
        {"block", rel(c.baseline.block, c.proactive.block)}}},
      {"recognition_lead",
       {{"stat", stat_json(describe(c.leads))},
        {"reaches", c.reaches},
        {"unrecognized", c.unrecognized}}},
      {"runs_with_contact", c.min_distance_violations},
  };
  return j.dump(2);
}

bool SuiteResult::safe_with_safety() const {
  return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) {
    return !e.safety || e.min_distance > 0.0;
  });
}

bool SuiteResult::recovers() const {
  return std::all_of(entries.begin(), entries.end(), [&](const SuiteEntry& e) {
    return !e.safety || e.longest_excursion <= max_recovery_ticks;
  });
}

bool SuiteResult::penetrates_without_safety() const {
  return std::any_of(entries.begin(), entries.end(), [](const SuiteEntry& e) {
    return !e.safety && e.min_distance <= 0.0;
  });
}

bool SuiteResult::posture_ordering() const {
  for (const auto& a : entries) {
    if (!a.safety || a.hazard != Hazard::kPosture ||
        a.posture != Posture::kConservative)
      continue;
    const auto b = std::find_if(entries.begin(), entries.end(), [&](auto& e) {
      return e.safety && e.hazard == Hazard::kPosture &&
             e.posture == Posture::kProactive && e.human == a.human &&
             e.seed == a.seed;
    });
    if (b == entries.end() || b->safety_ticks <= a.safety_ticks) return false;
  }
  return true;
}

double SuiteResult::min_distance(bool safety) const {
  double d = kNoAvoidDistance;
  for (const auto& e : entries)
    if (e.safety == safety) d = std::min(d, e.min_distance);
  return d;
}

int SuiteResult::longest_excursion(bool safety) const {
  int n = 0;
  for (const auto& e : entries)
    if (e.safety == safety) n = std::max(n, e.longest_excursion);
  return n;
}

SuiteResult safety_suite(const Scenario& scenario,
                         const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "no seeds");
  SuiteResult r;
  for (bool safety : {true, false}) {
    for (int h = 0; h < static_cast<int>(scenario.humans.size()); ++h) {
      for (std::uint64_t seed : seeds) {
        Scenario s = scenario;
        s.seed = seed;
        s.human_index = h;
        s.safety_enabled = safety;
        for (const HazardRun& run : disturbance_suite(s)) {
          r.entries.push_back({run.hazard, run.posture, safety, h, seed,
                               run.log.min_distance,
                               run.log.longest_phi_excursion,
                               run.log.safety_ticks, run.log.emergency_ticks});
        }
      }
    }
  }
  return r;
}

std::string suite_to_json(const SuiteResult& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& e : r.entries)
    runs.push_back({{"hazard", hazard_name(e.hazard)},
                    {"posture", posture_name(e.posture)},
                    {"safety", e.safety},
                    {"human", e.human},
                    {"seed", e.seed},
                    {"min_distance", e.min_distance},
                    {"longest_phi_excursion", e.longest_excursion},
                    {"safety_ticks", e.safety_ticks},
                    {"emergency_ticks", e.emergency_ticks}});
  nlohmann::json j = {
      {"checks",
       {{"no_contact_with_safety", r.safe_with_safety()},
        {"phi_recovers_within_ticks", r.recovers()},
        {"recovery_limit_ticks", r.max_recovery_ticks},
        {"contact_without_safety", r.penetrates_without_safety()},
        {"proactive_posture_triggers_more", r.posture_ordering()}}},
      {"min_distance", {{"safety_on", r.min_distance(true)},
                        {"safety_off", r.min_distance(false)}}},
      {"longest_phi_excursion", {{"safety_on", r.longest_excursion(true)},
                                 {"safety_off", r.longest_excursion(false)}}},
      {"runs", runs},
  };
  return j.dump(2);
}

}  // namespace hrc
