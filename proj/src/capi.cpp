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


#include "hrc/hrc.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "hrc/experiments.hpp"
#include "hrc/server.hpp"
#include "hrc/stream.hpp"
#include "json.hpp"

struct hrc_scenario {
  hrc::Scenario value;
};
struct hrc_model {
  hrc::MLPParams value;
};
struct hrc_run {
  hrc::MetricsLog log;
  hrc::Scenario scenario;
  std::string hazard;
};
struct hrc_session {
  hrc_session(hrc::Scenario s, std::optional<hrc::MLPParams> m)
      : value(std::move(s), std::move(m)) {}
  hrc::Session value;
};
struct hrc_server {
  hrc_server(hrc::Scenario s, std::optional<hrc::MLPParams> m,
             hrc::ServerOptions o)
      : value(std::move(s), std::move(m), std::move(o)) {}
  hrc::StreamServer value;
};

namespace {

thread_local std::string g_last_error;

hrc_status fail(hrc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs f, mapping exceptions to status codes.
template <typename F>
hrc_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return HRC_OK;
  } catch (const hrc::Error& e) {
    return fail(static_cast<hrc_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HRC_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HRC_INTERNAL, e.what());
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw hrc::Error(hrc::ErrorCode::kInvalidArgument, message);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw hrc::Error(hrc::ErrorCode::kIo, "cannot write '" + path + "'");
  return out;
}

hrc::Hazard parse_hazard(const char* name) {
  if (name == nullptr) return hrc::Hazard::kNone;
  for (hrc::Hazard h : {hrc::Hazard::kNone, hrc::Hazard::kLeftIncursion,
                        hrc::Hazard::kEarlyReach, hrc::Hazard::kPosture})
    if (std::strcmp(name, hrc::hazard_name(h)) == 0) return h;
  throw hrc::Error(hrc::ErrorCode::kInvalidArgument,
                   std::string("unknown hazard '") + name + "'");
}

std::optional<hrc::MLPParams> optional_model(const hrc_model* m) {
  return m ? std::optional<hrc::MLPParams>(m->value) : std::nullopt;
}

}  // namespace

extern "C" {

const char* hrc_last_error(void) { return g_last_error.c_str(); }

const char* hrc_status_name(hrc_status status) {
  switch (status) {
    case HRC_OK: return "ok";
    case HRC_INVALID_ARGUMENT: return "invalid_argument";
    case HRC_DIMENSION_MISMATCH: return "dimension_mismatch";
    case HRC_NO_AVOID_CAPSULE: return "no_avoid_capsule";
    case HRC_INCONSISTENT_OBSERVATION: return "inconsistent_observation";
    case HRC_INADMISSIBLE_EVENT: return "inadmissible_event";
    case HRC_UNREACHABLE_GOAL: return "unreachable_goal";
    case HRC_INFEASIBLE_PLAN: return "infeasible_plan";
    case HRC_DIVERGENCE: return "divergence";
    case HRC_TIMEOUT: return "timeout";
    case HRC_IO: return "io";
    case HRC_PARSE: return "parse";
    case HRC_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hrc_version(void) { return "1.0.0"; }

void hrc_string_free(char* s) { std::free(s); }

hrc_status hrc_scenario_default(hrc_scenario** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new hrc_scenario{hrc::default_scenario()};
  });
}

hrc_status hrc_scenario_load(const char* path, hrc_scenario** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new hrc_scenario{hrc::load_scenario_file(path)};
  });
}

hrc_status hrc_scenario_save(const hrc_scenario* s, const char* path) {
  return guarded([&] {
    require(s != nullptr && path != nullptr, "null argument");
    hrc::save_scenario_file(s->value, path);
  });
}

hrc_status hrc_scenario_to_json(const hrc_scenario* s, char** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    *out = duplicate(hrc::scenario_to_json(s->value));
  });
}

hrc_status hrc_scenario_set_seed(hrc_scenario* s, uint64_t seed) {
  return guarded([&] {
    require(s != nullptr, "null scenario");
    s->value.seed = seed;
  });
}

hrc_status hrc_scenario_set_mode(hrc_scenario* s, const char* mode) {
  return guarded([&] {
    require(s != nullptr && mode != nullptr, "null argument");
    s->value.mode = hrc::parse_mode(mode);
  });
}

hrc_status hrc_scenario_set_safety(hrc_scenario* s, int enabled) {
  return guarded([&] {
    require(s != nullptr, "null scenario");
    s->value.safety_enabled = enabled != 0;
  });
}

hrc_status hrc_scenario_set_human(hrc_scenario* s, int index) {
  return guarded([&] {
    require(s != nullptr, "null scenario");
    require(index >= 0 && index < static_cast<int>(s->value.humans.size()),
            "human model index out of range");
    s->value.human_index = index;
  });
}

hrc_status hrc_scenario_human_count(const hrc_scenario* s, int* out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    *out = static_cast<int>(s->value.humans.size());
  });
}

void hrc_scenario_free(hrc_scenario* s) { delete s; }

void hrc_train_options_default(hrc_train_options* out) {
  if (out == nullptr) return;
  const hrc::TrainSetup d;
  out->seed = d.train.seed;
  out->epochs = d.train.epochs;
  out->batch_size = d.train.batch_size;
  out->learning_rate = d.train.learning_rate;
  out->epsilon = d.attack.epsilon;
  out->attack_steps = d.attack.steps;
  out->iada_rounds = d.iada_rounds;
}

hrc_status hrc_model_train(const hrc_scenario* s,
                           const hrc_train_options* options, hrc_model** out,
                           hrc_train_report* report) {
  return guarded([&] {
    require(s != nullptr && options != nullptr && out != nullptr,
            "null argument");
    hrc::TrainSetup setup;
    setup.train.seed = options->seed;
    setup.train.epochs = options->epochs;
    setup.train.batch_size = options->batch_size;
    setup.train.learning_rate = options->learning_rate;
    setup.attack.epsilon = options->epsilon;
    setup.attack.steps = options->attack_steps;
    setup.iada_rounds = options->iada_rounds;
    hrc::TrainOutcome r = hrc::train_intention_model(s->value, setup);
    if (report != nullptr)
      *report = {r.train_size,     r.heldout_size, r.clean_accuracy,
                 r.adversarial_accuracy, r.verified, r.pseudo};
    *out = new hrc_model{std::move(r.model)};
  });
}

hrc_status hrc_model_load(const char* path, hrc_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new hrc_model{hrc::load_model_file(path)};
  });
}

hrc_status hrc_model_save(const hrc_model* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "null argument");
    hrc::save_model_file(m->value, path);
  });
}

hrc_status hrc_model_predict(const hrc_model* m, const double* features,
                             size_t n, int* label_index, double* confidence) {
  return guarded([&] {
    require(m != nullptr && features != nullptr && label_index != nullptr,
            "null argument");
    if (n != static_cast<size_t>(hrc::kFeatureDim))
      throw hrc::Error(hrc::ErrorCode::kDimensionMismatch,
                       "feature vector must have " +
                           std::to_string(hrc::kFeatureDim) + " entries");
    const hrc::FeatureVector x = Eigen::Map<const hrc::FeatureVector>(features);
    const hrc::Prediction p = hrc::predict(m->value, x);
    *label_index = p.label.index();
    if (confidence != nullptr) *confidence = p.confidence;
  });
}

void hrc_model_free(hrc_model* m) { delete m; }

hrc_status hrc_run_scenario(const hrc_scenario* s, const hrc_model* m,
                            const char* hazard, hrc_run** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    hrc::SimOptions options;
    options.hazard = parse_hazard(hazard);
    auto run = std::make_unique<hrc_run>();
    run->log = hrc::run_scenario(s->value, m ? &m->value : nullptr, options);
    run->scenario = s->value;
    run->hazard = hrc::hazard_name(options.hazard);
    *out = run.release();
  });
}

hrc_status hrc_run_write_telemetry(const hrc_run* r, const char* path) {
  return guarded([&] {
    require(r != nullptr && path != nullptr, "null argument");
    std::ofstream out = open_out(path);
    hrc::write_telemetry_csv(r->log, out);
  });
}

hrc_status hrc_run_write_events(const hrc_run* r, const char* path) {
  return guarded([&] {
    require(r != nullptr && path != nullptr, "null argument");
    std::ofstream out = open_out(path);
    hrc::write_events_csv(r->log, out);
  });
}

hrc_status hrc_run_summary(const hrc_run* r, char** json) {
  return guarded([&] {
    require(r != nullptr && json != nullptr, "null argument");
    const hrc::MetricsLog& l = r->log;
    const hrc::Stat lead = hrc::describe(l.recognition_leads);
    nlohmann::json j = {
        {"seed", r->scenario.seed},
        {"mode", hrc::mode_name(r->scenario.mode)},
        {"safety_enabled", r->scenario.safety_enabled},
        {"human_model", r->scenario.human().name},
        {"hazard", r->hazard},
        {"completed", l.totals.completed},
        {"task_time", l.totals.task_time},
        {"surface_times", l.totals.surface_times},
        {"block_times", l.totals.block_times},
        {"first_block_times", l.totals.first_block_times},
        {"ticks", l.telemetry.size()},
        {"min_distance", l.min_distance},
        {"safety_ticks", l.safety_ticks},
        {"emergency_ticks", l.emergency_ticks},
        {"longest_phi_excursion", l.longest_phi_excursion},
        {"reaches", l.reaches},
        {"recognized_reaches", l.recognition_leads.size()},
        {"mean_recognition_lead", lead.avg},
    };
    *json = duplicate(j.dump(2));
  });
}

void hrc_run_free(hrc_run* r) { delete r; }

hrc_status hrc_compare(const hrc_scenario* s, const hrc_model* m,
                       const uint64_t* seeds, size_t n_seeds,
                       const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(s != nullptr && m != nullptr && seeds != nullptr &&
                summary_json != nullptr,
            "null argument");
    const std::vector<std::uint64_t> list(seeds, seeds + n_seeds);
    hrc::RunSink sink;
    if (out_dir != nullptr) {
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      sink = [dir](hrc::Mode mode, std::uint64_t seed,
                   const hrc::MetricsLog& log) {
        const std::string stem =
            std::string(hrc::mode_name(mode)) + "_seed" + std::to_string(seed);
        std::ofstream t = open_out((dir / (stem + "_telemetry.csv")).string());
        hrc::write_telemetry_csv(log, t);
        std::ofstream e = open_out((dir / (stem + "_events.csv")).string());
        hrc::write_events_csv(log, e);
      };
    }
    const hrc::Comparison c = hrc::compare_modes(s->value, m->value, list, sink);
    *summary_json = duplicate(hrc::comparison_to_json(c));
  });
}

hrc_status hrc_safety_suite(const hrc_scenario* s, const uint64_t* seeds,
                            size_t n_seeds, char** report_json, int* passed) {
  return guarded([&] {
    require(s != nullptr && seeds != nullptr && report_json != nullptr,
            "null argument");
    const hrc::SuiteResult r = hrc::safety_suite(
        s->value, std::vector<std::uint64_t>(seeds, seeds + n_seeds));
    if (passed != nullptr)
      *passed = r.safe_with_safety() && r.recovers() &&
                r.penetrates_without_safety() && r.posture_ordering();
    *report_json = duplicate(hrc::suite_to_json(r));
  });
}

hrc_status hrc_session_create(const hrc_scenario* s, const hrc_model* m,
                              hrc_session** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    *out = new hrc_session(s->value, optional_model(m));
  });
}

hrc_status hrc_session_post(hrc_session* session, const char* control_json) {
  return guarded([&] {
    require(session != nullptr && control_json != nullptr, "null argument");
    session->value.post(hrc::control_from_json(control_json));
  });
}

hrc_status hrc_session_take_errors(hrc_session* session, char** json) {
  return guarded([&] {
    require(session != nullptr && json != nullptr, "null argument");
    *json = duplicate(nlohmann::json(session->value.drain_errors()).dump());
  });
}

hrc_status hrc_session_advance(hrc_session* session, char** snapshot_json) {
  return guarded([&] {
    require(session != nullptr && snapshot_json != nullptr, "null argument");
    *snapshot_json =
        duplicate(hrc::snapshot_to_json(session->value.advance()));
  });
}

void hrc_session_free(hrc_session* session) { delete session; }

void hrc_server_options_default(hrc_server_options* out) {
  if (out == nullptr) return;
  const hrc::ServerOptions d;
  out->address = "127.0.0.1";
  out->port = d.port;
  out->tick_rate = d.tick_rate;
  out->client_queue = d.client_queue;
}

hrc_status hrc_server_start(const hrc_scenario* s, const hrc_model* m,
                            const hrc_server_options* options,
                            hrc_server** out) {
  return guarded([&] {
    require(s != nullptr && options != nullptr && out != nullptr,
            "null argument");
    require(options->port >= 0 && options->port <= 65535, "port out of range");
    hrc::ServerOptions o;
    if (options->address != nullptr) o.address = options->address;
    o.port = static_cast<unsigned short>(options->port);
    o.tick_rate = options->tick_rate;
    o.client_queue = options->client_queue;
    auto server =
        std::make_unique<hrc_server>(s->value, optional_model(m), o);
    server->value.start();
    *out = server.release();
  });
}

hrc_status hrc_server_port(const hrc_server* server, int* port) {
  return guarded([&] {
    require(server != nullptr && port != nullptr, "null argument");
    *port = server->value.port();
  });
}

hrc_status hrc_server_stats_get(const hrc_server* server,
                                hrc_server_stats* out) {
  return guarded([&] {
    require(server != nullptr && out != nullptr, "null argument");
    const hrc::ServerStats st = server->value.stats();
    *out = {st.ticks, st.clients, st.dropped, st.rejected};
  });
}

void hrc_server_free(hrc_server* server) { delete server; }

}  // extern "C"
