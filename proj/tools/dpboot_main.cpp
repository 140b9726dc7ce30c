// Copyright 2026 The dpboot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand goes through the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dpboot/dpboot.h"

namespace {

int Report(dpboot_status status) {
  std::cerr << "dpboot: " << dpboot_status_string(status) << ": "
            << dpboot_last_error() << "\n";
  return static_cast<int>(status) == 0 ? 0 : 1 + (static_cast<int>(status) % 100);
}

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int RunExperiment(const std::string& kind, const Options& opts) {
  dpboot_experiment* exp = nullptr;
  dpboot_status st = dpboot_experiment_load(opts.config.c_str(), &exp);
  if (st != DPBOOT_OK) return Report(st);
  st = dpboot_experiment_set_kind(exp, kind.c_str());
  if (st == DPBOOT_OK && opts.seed) st = dpboot_experiment_set_seed(exp, *opts.seed);
  if (st == DPBOOT_OK && opts.threads) {
    st = dpboot_experiment_set_threads(exp, *opts.threads);
  }
  std::size_t failed = 0;
  if (st == DPBOOT_OK) {
    st = dpboot_experiment_run(exp, opts.out.empty() ? nullptr : opts.out.c_str(),
                               &failed);
  }
  dpboot_experiment_destroy(exp);
  if (st != DPBOOT_OK) return Report(st);
  if (failed > 0) std::cerr << "dpboot: " << failed << " trial(s) failed\n";
  return 0;
}

int RunEstimate(const Options& opts) {
  std::ifstream in(opts.config);
  if (!in) {
    std::cerr << "dpboot: cannot open config '" << opts.config << "'\n";
    return 1;
  }
  std::stringstream text;
  text << in.rdbuf();
  char* json = nullptr;
  const dpboot_status st =
      dpboot_estimate_file(text.str().c_str(), opts.data.c_str(),
                           opts.seed.value_or(0), opts.threads.value_or(1), &json);
  if (st != DPBOOT_OK) return Report(st);
  if (opts.out.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(opts.out);
    out << json << "\n";
    if (!out) {
      dpboot_string_free(json);
      std::cerr << "dpboot: cannot write '" << opts.out << "'\n";
      return 1;
    }
  }
  dpboot_string_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private estimates with parametric-bootstrap "
               "confidence intervals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dpboot_version());

  Options opts;
  const std::pair<const char*, const char*> experiments[] = {
      {"coverage", "observed vs nominal coverage"},
      {"width", "mean interval widths"},
      {"bias", "raw and bias-corrected estimates under clamping"},
      {"sa-compare", "parametric bootstrap vs subsample-and-aggregate"},
      {"ols", "private linear regression coverage"},
  };
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + help +
                                                 " experiment");
    sub->add_option("--config", opts.config, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "CSV output path (default: config output)");
    sub->add_option("--seed", opts.seed, "master seed (overrides config)");
    sub->add_option("--threads", opts.threads,
                    "worker threads, 0 = all cores (overrides config)");
  }
  CLI::App* est = app.add_subcommand("estimate", "Analyse one dataset from CSV");
  est->add_option("--config", opts.config, "JSON estimate config")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--data", opts.data, "headerless numeric CSV")
      ->required()
      ->check(CLI::ExistingFile);
  est->add_option("--out", opts.out, "JSON output path (default: stdout)");
  est->add_option("--seed", opts.seed, "random seed");
  est->add_option("--threads", opts.threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : app.get_subcommands()) {
    const std::string name = sub->get_name();
    if (name == "estimate") return RunEstimate(opts);
    return RunExperiment(name, opts);
  }
  return 1;
}
