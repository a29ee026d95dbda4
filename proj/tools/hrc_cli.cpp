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


// Command-line front end. Talks to the library through the C API only.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hrc/hrc.h"

#ifndef HRC_DEFAULT_MODEL
#define HRC_DEFAULT_MODEL "models/default.model"
#endif

namespace {

struct Failure {
  hrc_status status;
};

void check(hrc_status s) {
  if (s != HRC_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ScenarioPtr =
    std::unique_ptr<hrc_scenario, Deleter<hrc_scenario, hrc_scenario_free>>;
using ModelPtr = std::unique_ptr<hrc_model, Deleter<hrc_model, hrc_model_free>>;
using RunPtr = std::unique_ptr<hrc_run, Deleter<hrc_run, hrc_run_free>>;
using ServerPtr =
    std::unique_ptr<hrc_server, Deleter<hrc_server, hrc_server_free>>;
using StringPtr = std::unique_ptr<char, Deleter<char, hrc_string_free>>;

ScenarioPtr load_scenario(const std::string& path) {
  hrc_scenario* s = nullptr;
  check(path.empty() ? hrc_scenario_default(&s) : hrc_scenario_load(path.c_str(), &s));
  return ScenarioPtr(s);
}

ModelPtr load_model(const std::string& path) {
  hrc_model* m = nullptr;
  check(hrc_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

// "1-10", "3,5,8" or a mix such as "1-3,7".
std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    std::size_t used = 0;
    if (dash == std::string::npos) {
      out.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } else {
      const uint64_t a = std::stoull(part.substr(0, dash));
      const uint64_t b = std::stoull(part.substr(dash + 1));
      if (b < a) throw std::invalid_argument(part);
      for (uint64_t k = a; k <= b; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text << '\n';
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

struct Common {
  std::string scenario;
  std::string model = HRC_DEFAULT_MODEL;
};

void add_common(CLI::App* app, Common& c, bool model) {
  app->add_option("--scenario", c.scenario,
                  "Scenario JSON (built-in default when omitted)")
      ->check(CLI::ExistingFile);
  if (model)
    app->add_option("--model", c.model, "Intention model file")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proactive human-robot co-assembly simulator"};
  app.require_subcommand(1);

  Common common;

  // train
  auto* train = app.add_subcommand("train", "Train the intention classifier");
  add_common(train, common, false);
  std::string train_out = HRC_DEFAULT_MODEL;
  hrc_train_options topt;
  hrc_train_options_default(&topt);
  bool with_plain = false;
  train->add_option("--out", train_out, "Model file to write")->capture_default_str();
  train->add_option("--seed", topt.seed, "Training seed")->capture_default_str();
  train->add_option("--iada-rounds", topt.iada_rounds, "IADA rounds, 0 = plain")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--epsilon", topt.epsilon, "Attack budget")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--epochs", topt.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--batch-size", topt.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--learning-rate", topt.learning_rate)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_flag("--with-plain", with_plain,
                  "Also train without augmentation and print both rows");

  // run
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, common, true);
  uint64_t run_seed = 7;
  std::string run_mode = "proactive", run_safety = "on", run_hazard = "none";
  std::string run_out = "out";
  int run_human = -1;
  run->add_option("--seed", run_seed)->capture_default_str();
  run->add_option("--mode", run_mode)
      ->check(CLI::IsMember({"baseline", "proactive"}))->capture_default_str();
  run->add_option("--safety", run_safety)
      ->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  run->add_option("--human", run_human, "Human model index (scenario default when omitted)");
  run->add_option("--hazard", run_hazard)
      ->check(CLI::IsMember({"none", "left_hand_incursion", "early_reach", "posture"}))
      ->capture_default_str();
  run->add_option("--out-dir", run_out)->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare", "Baseline against proactive over seeds");
  add_common(cmp, common, true);
  std::string cmp_seeds = "1-10", cmp_out = "out";
  bool cmp_csv = false;
  cmp->add_option("--seeds", cmp_seeds, "Seed list, e.g. 1-10 or 1,4,9")->capture_default_str();
  cmp->add_option("--out-dir", cmp_out)->capture_default_str();
  cmp->add_flag("--csv", cmp_csv, "Write telemetry and events CSV per run");

  // serve
  auto* serve = app.add_subcommand("serve", "Stream a live session over WebSocket");
  add_common(serve, common, true);
  std::string listen = "127.0.0.1:8765", serve_mode = "proactive";
  double serve_duration = 0.0;
  hrc_server_options sopt;
  hrc_server_options_default(&sopt);
  serve->add_option("--listen", listen, "address:port")->capture_default_str();
  serve->add_option("--mode", serve_mode)
      ->check(CLI::IsMember({"baseline", "proactive"}))->capture_default_str();
  serve->add_option("--tick-rate", sopt.tick_rate)->check(CLI::PositiveNumber)->capture_default_str();
  serve->add_option("--duration", serve_duration, "Seconds to serve, 0 = until interrupted")
      ->check(CLI::NonNegativeNumber);

  // safety-suite
  auto* suite = app.add_subcommand("safety-suite", "Scripted hazards with safety on and off");
  add_common(suite, common, false);
  std::string suite_seeds = "1-10", suite_out = "out";
  suite->add_option("--seeds", suite_seeds)->capture_default_str();
  suite->add_option("--out-dir", suite_out)->capture_default_str();

  // scenario
  auto* scen = app.add_subcommand("scenario", "Write the scenario JSON");
  add_common(scen, common, false);
  std::string scen_out;
  scen->add_option("--out", scen_out, "Destination (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      ScenarioPtr s = load_scenario(common.scenario);
      std::printf("%-10s %8s %8s %10s %10s %9s %7s\n", "model", "train", "heldout",
                  "clean_acc", "adv_acc", "verified", "pseudo");
      auto row = [](const char* name, const hrc_train_report& r) {
        std::printf("%-10s %8zu %8zu %10.4f %10.4f %9d %7d\n", name, r.train_size,
                    r.heldout_size, r.clean_accuracy, r.adversarial_accuracy,
                    r.verified, r.pseudo);
      };
      if (with_plain && topt.iada_rounds > 0) {
        hrc_train_options p = topt;
        p.iada_rounds = 0;
        hrc_model* m = nullptr;
        hrc_train_report r;
        check(hrc_model_train(s.get(), &p, &m, &r));
        hrc_model_free(m);
        row("plain", r);
      }
      hrc_model* m = nullptr;
      hrc_train_report r;
      check(hrc_model_train(s.get(), &topt, &m, &r));
      ModelPtr model(m);
      const std::string name =
          topt.iada_rounds > 0 ? "iada(" + std::to_string(topt.iada_rounds) + ")" : "plain";
      row(name.c_str(), r);
      const auto parent = std::filesystem::path(train_out).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      check(hrc_model_save(model.get(), train_out.c_str()));
      std::printf("model written to %s\n", train_out.c_str());
    } else if (*run) {
      ScenarioPtr s = load_scenario(common.scenario);
      check(hrc_scenario_set_seed(s.get(), run_seed));
      check(hrc_scenario_set_mode(s.get(), run_mode.c_str()));
      check(hrc_scenario_set_safety(s.get(), run_safety == "on"));
      if (run_human >= 0) check(hrc_scenario_set_human(s.get(), run_human));
      ModelPtr model;
      if (run_mode == "proactive") model = load_model(common.model);
      hrc_run* r = nullptr;
      check(hrc_run_scenario(s.get(), model.get(), run_hazard.c_str(), &r));
      RunPtr result(r);
      const std::filesystem::path dir(run_out);
      std::filesystem::create_directories(dir);
      check(hrc_run_write_telemetry(r, (dir / "telemetry.csv").string().c_str()));
      check(hrc_run_write_events(r, (dir / "events.csv").string().c_str()));
      char* summary = nullptr;
      check(hrc_run_summary(r, &summary));
      StringPtr text(summary);
      write_text(dir / "summary.json", summary);
      std::printf("%s\n", summary);
    } else if (*cmp) {
      ScenarioPtr s = load_scenario(common.scenario);
      ModelPtr model = load_model(common.model);
      const std::vector<uint64_t> seeds = parse_seeds(cmp_seeds);
      const std::filesystem::path dir(cmp_out);
      std::filesystem::create_directories(dir);
      char* summary = nullptr;
      check(hrc_compare(s.get(), model.get(), seeds.data(), seeds.size(),
                        cmp_csv ? dir.string().c_str() : nullptr, &summary));
      StringPtr text(summary);
      write_text(dir / "summary.json", summary);
      std::printf("%s\n", summary);
    } else if (*serve) {
      ScenarioPtr s = load_scenario(common.scenario);
      check(hrc_scenario_set_mode(s.get(), serve_mode.c_str()));
      ModelPtr model;
      if (serve_mode == "proactive") model = load_model(common.model);
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) {
        std::cerr << "--listen expects address:port\n";
        return 2;
      }
      const std::string address = listen.substr(0, colon);
      sopt.address = address.c_str();
      sopt.port = std::stoi(listen.substr(colon + 1));
      hrc_server* srv = nullptr;
      check(hrc_server_start(s.get(), model.get(), &sopt, &srv));
      ServerPtr server(srv);
      int port = 0;
      check(hrc_server_port(srv, &port));
      std::printf("streaming on ws://%s:%d\n", address.c_str(), port);
      std::fflush(stdout);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const auto start = std::chrono::steady_clock::now();
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        const double elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        if (serve_duration > 0.0 && elapsed >= serve_duration) break;
      }
      hrc_server_stats st;
      check(hrc_server_stats_get(srv, &st));
      std::printf("ticks %llu dropped %llu rejected %llu\n",
                  static_cast<unsigned long long>(st.ticks),
                  static_cast<unsigned long long>(st.dropped),
                  static_cast<unsigned long long>(st.rejected));
    } else if (*suite) {
      ScenarioPtr s = load_scenario(common.scenario);
      const std::vector<uint64_t> seeds = parse_seeds(suite_seeds);
      const std::filesystem::path dir(suite_out);
      std::filesystem::create_directories(dir);
      char* report = nullptr;
      int passed = 0;
      check(hrc_safety_suite(s.get(), seeds.data(), seeds.size(), &report, &passed));
      StringPtr text(report);
      write_text(dir / "safety_suite.json", report);
      std::printf("safety suite %s, report in %s\n", passed ? "PASSED" : "FAILED",
                  (dir / "safety_suite.json").string().c_str());
      return passed ? 0 : 1;
    } else if (*scen) {
      ScenarioPtr s = load_scenario(common.scenario);
      if (scen_out.empty()) {
        char* json = nullptr;
        check(hrc_scenario_to_json(s.get(), &json));
        StringPtr text(json);
        std::printf("%s\n", json);
      } else {
        check(hrc_scenario_save(s.get(), scen_out.c_str()));
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << hrc_status_name(f.status) << "): " << hrc_last_error()
              << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
