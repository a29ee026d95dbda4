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


#ifndef HRC_HRC_H_
#define HRC_HRC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HRC_API __declspec(dllexport)
#else
#define HRC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hrc_status {
  HRC_OK = 0,
  HRC_INVALID_ARGUMENT = 1,
  HRC_DIMENSION_MISMATCH = 2,
  HRC_NO_AVOID_CAPSULE = 3,
  HRC_INCONSISTENT_OBSERVATION = 4,
  HRC_INADMISSIBLE_EVENT = 5,
  HRC_UNREACHABLE_GOAL = 6,
  HRC_INFEASIBLE_PLAN = 7,
  HRC_DIVERGENCE = 8,
  HRC_TIMEOUT = 9,
  HRC_IO = 10,
  HRC_PARSE = 11,
  HRC_INTERNAL = 100
} hrc_status;

#define HRC_FEATURE_DIM 49
#define HRC_NUM_INTENTIONS 13

typedef struct hrc_scenario hrc_scenario;
typedef struct hrc_model hrc_model;
typedef struct hrc_run hrc_run;
typedef struct hrc_session hrc_session;
typedef struct hrc_server hrc_server;

/* Message of the last failed call on this thread; "" after a success. */
HRC_API const char* hrc_last_error(void);
HRC_API const char* hrc_status_name(hrc_status status);
HRC_API const char* hrc_version(void);
/* Frees strings returned through char** out parameters. */
HRC_API void hrc_string_free(char* s);

/* Scenario configuration. */
HRC_API hrc_status hrc_scenario_default(hrc_scenario** out);
HRC_API hrc_status hrc_scenario_load(const char* path, hrc_scenario** out);
HRC_API hrc_status hrc_scenario_save(const hrc_scenario* s, const char* path);
HRC_API hrc_status hrc_scenario_to_json(const hrc_scenario* s, char** out);
HRC_API hrc_status hrc_scenario_set_seed(hrc_scenario* s, uint64_t seed);
/* "baseline" or "proactive". */
HRC_API hrc_status hrc_scenario_set_mode(hrc_scenario* s, const char* mode);
HRC_API hrc_status hrc_scenario_set_safety(hrc_scenario* s, int enabled);
HRC_API hrc_status hrc_scenario_set_human(hrc_scenario* s, int index);
HRC_API hrc_status hrc_scenario_human_count(const hrc_scenario* s, int* out);
HRC_API void hrc_scenario_free(hrc_scenario* s);

/* Intention model. */
typedef struct hrc_train_options {
  uint64_t seed;
  int epochs;
  int batch_size;
  double learning_rate;
  double epsilon;     /* attack budget, feature units */
  int attack_steps;
  int iada_rounds;    /* 0 = plain training */
} hrc_train_options;

typedef struct hrc_train_report {
  size_t train_size;
  size_t heldout_size;
  double clean_accuracy;
  double adversarial_accuracy;
  int verified;
  int pseudo;
} hrc_train_report;

HRC_API void hrc_train_options_default(hrc_train_options* out);
/* report may be NULL. */
HRC_API hrc_status hrc_model_train(const hrc_scenario* s,
                                   const hrc_train_options* options,
                                   hrc_model** out, hrc_train_report* report);
HRC_API hrc_status hrc_model_load(const char* path, hrc_model** out);
HRC_API hrc_status hrc_model_save(const hrc_model* m, const char* path);
HRC_API hrc_status hrc_model_predict(const hrc_model* m, const double* features,
                                     size_t n, int* label_index,
                                     double* confidence);
HRC_API void hrc_model_free(hrc_model* m);

/* Single runs. model may be NULL in baseline mode. hazard is NULL, "none",
 * "left_hand_incursion", "early_reach" or "posture". */
HRC_API hrc_status hrc_run_scenario(const hrc_scenario* s, const hrc_model* m,
                                    const char* hazard, hrc_run** out);
HRC_API hrc_status hrc_run_write_telemetry(const hrc_run* r, const char* path);
HRC_API hrc_status hrc_run_write_events(const hrc_run* r, const char* path);
HRC_API hrc_status hrc_run_summary(const hrc_run* r, char** json);
HRC_API void hrc_run_free(hrc_run* r);

/* Baseline against proactive. out_dir may be NULL; otherwise every run
 * writes <mode>_seed<k>_telemetry.csv and <mode>_seed<k>_events.csv. */
HRC_API hrc_status hrc_compare(const hrc_scenario* s, const hrc_model* m,
                               const uint64_t* seeds, size_t n_seeds,
                               const char* out_dir, char** summary_json);

/* All hazards for all human models and seeds, safety on and off. passed is
 * 1 when every check holds. */
HRC_API hrc_status hrc_safety_suite(const hrc_scenario* s,
                                    const uint64_t* seeds, size_t n_seeds,
                                    char** report_json, int* passed);

/* Interactive session, the same protocol as the stream server. Posted
 * control messages are applied at the next advance; a message that parses
 * but cannot be applied is reported by hrc_session_take_errors. */
HRC_API hrc_status hrc_session_create(const hrc_scenario* s, const hrc_model* m,
                                      hrc_session** out);
HRC_API hrc_status hrc_session_post(hrc_session* session,
                                    const char* control_json);
HRC_API hrc_status hrc_session_advance(hrc_session* session,
                                       char** snapshot_json);
/* JSON array of rejection messages since the last call. */
HRC_API hrc_status hrc_session_take_errors(hrc_session* session, char** json);
HRC_API void hrc_session_free(hrc_session* session);

/* WebSocket stream server. */
typedef struct hrc_server_options {
  const char* address;
  int port;             /* 0 picks a free port */
  double tick_rate;     /* Hz */
  size_t client_queue;  /* pending messages per client */
} hrc_server_options;

typedef struct hrc_server_stats {
  uint64_t ticks;
  uint64_t clients;
  uint64_t dropped;
  uint64_t rejected;
} hrc_server_stats;

HRC_API void hrc_server_options_default(hrc_server_options* out);
HRC_API hrc_status hrc_server_start(const hrc_scenario* s, const hrc_model* m,
                                    const hrc_server_options* options,
                                    hrc_server** out);
HRC_API hrc_status hrc_server_port(const hrc_server* server, int* port);
HRC_API hrc_status hrc_server_stats_get(const hrc_server* server,
                                        hrc_server_stats* out);
/* Stops and frees. */
HRC_API void hrc_server_free(hrc_server* server);

#ifdef __cplusplus
}
#endif

#endif  /* HRC_HRC_H_ */
