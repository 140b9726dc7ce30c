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

// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// seed is pinned here; nothing is tuned after seeing results.
//
//   dpboot_acceptance                 run every criterion
//   dpboot_acceptance --criterion 3   run one criterion (repeatable)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "dpboot/error.hpp"
#include "dpboot/expfam.hpp"
#include "dpboot/harness.hpp"
#include "dpboot/ols.hpp"
#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"
#include "family_oracles.hpp"
#include "oracles.hpp"

#ifndef DPBOOT_CLI_PATH
#error "DPBOOT_CLI_PATH must name the dpboot executable"
#endif

namespace dpboot {
namespace {

constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double runtime_budget_s;  // <= 0: no runtime requirement
  std::function<Outcome()> run;
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

const SummaryRecord& Find(const ExperimentOutput& out, const std::string& method,
                          double alpha, std::size_t n = 0, double setting = 0.0) {
  for (const SummaryRecord& s : out.summary) {
    if (s.method == method && std::abs(s.alpha - alpha) < 1e-12 &&
        (n == 0 || s.n == n) && s.setting == setting) {
      return s;
    }
  }
  Fail(ErrorCode::kInvalidConfig, "summary row not found for " + method);
}

// ---- Poisson coverage run shared by criteria 1, 2 and 9.

constexpr double kLevels[] = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};

const ExperimentOutput& PoissonCoverageRun() {
  static const ExperimentOutput out = [] {
    ExperimentConfig c = ParseExperimentConfig(R"({
      "experiment": "coverage",
      "model": {"name": "poisson", "params": [2.3]},
      "n": [100], "epsilon": [0.5],
      "coverage": [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
      "trials": 1000, "replicates": 200,
      "bounds": {"mode": "surrogate", "surrogate_size": 1000},
      "threads": 0})");
    c.seed = kSeed;
    return RunExperiment(c);
  }();
  return out;
}

Outcome CoverageCalibration() {
  const ExperimentOutput& out = PoissonCoverageRun();
  double max_dev = 0.0;
  std::string per_level;
  for (double level : kLevels) {
    const SummaryRecord& s = Find(out, "pb", 1.0 - level);
    max_dev = std::max(max_dev, std::abs(s.coverage - level));
    per_level += Fmt(" %.2f", level) + "->" + Fmt("%.3f", s.coverage);
  }
  const double cov95 = Find(out, "pb", 1.0 - 0.95).coverage;
  Outcome o;
  o.pass = cov95 >= 0.93 && cov95 <= 0.97 && max_dev <= 0.03 && out.failed_trials == 0;
  o.detail = "pb coverage at 0.95 = " + Fmt("%.3f", cov95) + " (need [0.93, 0.97]); " +
             "max |observed - nominal| = " + Fmt("%.3f", max_dev) + " (need <= 0.03);" +
             per_level + "; failed trials " + std::to_string(out.failed_trials);
  return o;
}

Outcome FisherUndercoverage() {
  const ExperimentOutput& out = PoissonCoverageRun();
  const double priv = Find(out, "fisher-private", 0.05).coverage;
  const double nonpriv = Find(out, "fisher-nonprivate", 0.05).coverage;
  Outcome o;
  o.pass = priv < 0.90 && nonpriv >= 0.92 && nonpriv <= 0.97;
  o.detail = "private Fisher 95% coverage = " + Fmt("%.3f", priv) +
             " (need < 0.90); non-private Fisher = " + Fmt("%.3f", nonpriv) +
             " (need [0.92, 0.97])";
  return o;
}

Outcome TailBalance() {
  const ExperimentOutput& out = PoissonCoverageRun();
  bool pass = true;
  std::string detail = "pb failures high/low per level:";
  for (double level : kLevels) {
    const SummaryRecord& s = Find(out, "pb", 1.0 - level);
    const double hi = static_cast<double>(s.failed_high);
    const double lo = static_cast<double>(s.failed_low);
    const bool ok = std::abs(hi - lo) <= 3.0 * std::sqrt(hi + lo);
    pass = pass && ok;
    detail += Fmt(" %.2f:", level) + std::to_string(s.failed_high) + "/" +
              std::to_string(s.failed_low) + (ok ? "" : "(unbalanced)");
  }
  return {pass, detail + " (need |high - low| <= 3 sqrt(high + low) at every level)"};
}

// ---- Criterion 3.

Outcome WidthConvergence() {
  ExperimentConfig c = ParseExperimentConfig(R"({
    "experiment": "width",
    "model": {"name": "gamma-scale", "params": [2.0], "fixed": [3.0]},
    "n": [100, 1000, 10000, 100000], "epsilon": [0.5], "alpha": [0.05],
    "trials": 300, "replicates": 200,
    "bounds": {"mode": "surrogate", "surrogate_size": 1000},
    "threads": 0})");
  c.seed = kSeed;
  const ExperimentOutput out = RunExperiment(c);
  std::vector<double> ratios;
  std::string detail = "mean PB width / mean non-private Fisher width:";
  for (std::size_t n : c.n_grid) {
    const double r = Find(out, "pb", 0.05, n).mean_width /
                     Find(out, "fisher-nonprivate", 0.05, n).mean_width;
    ratios.push_back(r);
    detail += " n=" + std::to_string(n) + ":" + Fmt("%.4f", r);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    monotone = monotone && ratios[i] <= 1.05 * ratios[i - 1];
  }
  Outcome o;
  o.pass = monotone && ratios.back() <= 1.15 && out.failed_trials == 0;
  o.detail = detail + "; non-increasing within 5%: " + (monotone ? "yes" : "no") +
             "; final ratio need <= 1.15; failed trials " +
             std::to_string(out.failed_trials);
  return o;
}

// ---- Criterion 4.

Outcome OlsPivotAsymptotics() {
  const Eigen::Index n = 100000;
  const std::size_t trials = 2000;
  const Eigen::VectorXd beta = Eigen::VectorXd::Ones(2);
  const SyntheticRegressionOptions gen;  // x ~ U[-5, 5]^2, noise ~ U[-10, 10]
  RegressionBounds bounds;
  bounds.x = Bounds::Repeat(2, -gen.x_half_width, gen.x_half_width);
  bounds.y = {-gen.y_bound, gen.y_bound};
  bounds.residual_bound = 2.0 * gen.noise_half_width;
  // Limit law: sigma^2 Q^{-1} with Q = E[x x^T] = diag(w^2 / 12) for
  // uniform covariates of width w and sigma^2 = (noise width)^2 / 12.
  const double x_width = 2.0 * gen.x_half_width;
  const double noise_width = 2.0 * gen.noise_half_width;
  const double sd = std::sqrt((noise_width * noise_width / 12.0) /
                              (x_width * x_width / 12.0));
  const PrivacyBudget priv = DefaultRegressionBudget(1.0);
  const PrivacyBudget noiseless = DefaultRegressionBudget(kNoiseless);
  std::vector<std::vector<double>> pivots(2), pivots_np(2);
  const RandomStream master(kSeed);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RandomStream rng = master.Child(t);
    RandomStream data_rng = rng.Child(0);
    const SyntheticRegression synth = GenerateSyntheticRegression(n, beta, data_rng, gen);
    const double root_n = std::sqrt(static_cast<double>(synth.data.x.rows()));
    RandomStream np_rng = rng.Child(2);
    const RegressionRelease np = SspOlsRelease(synth.data, bounds, noiseless, np_rng);
    for (int j = 0; j < 2; ++j) pivots_np[j].push_back(root_n * (np.beta_hat[j] - beta[j]));
    try {
      RandomStream release_rng = rng.Child(1);
      const RegressionRelease r = SspOlsRelease(synth.data, bounds, priv, release_rng);
      for (int j = 0; j < 2; ++j) pivots[j].push_back(root_n * (r.beta_hat[j] - beta[j]));
    } catch (const Error&) {
      ++failures;
    }
  }
  bool pass = failures == 0;
  std::string detail = "limit sd " + Fmt("%.3f", sd) + ";";
  for (int j = 0; j < 2; ++j) {
    const double ks = oracle::KsDistanceNormal(pivots[j], sd);
    const double ks_np = oracle::KsDistanceNormal(pivots_np[j], sd);
    pass = pass && ks < 0.05;
    detail += " beta" + std::to_string(j) + ": KS " + Fmt("%.4f", ks) +
              " (need < 0.05), empirical sd " +
              Fmt("%.3f", std::sqrt(oracle::Variance(pivots[j]))) +
              ", noiseless-release KS " + Fmt("%.4f", ks_np) + ";";
  }
  detail += " failed releases " + std::to_string(failures);
  return {pass, detail};
}

// ---- Criterion 5.

Outcome HybridIdentity() {
  RandomStream meta(kSeed, {5});
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double worst = 0.0;
  while (checked < 100) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(SamplePoisson(1.5, meta)) % 4;
    const Eigen::Index n = p + 20 + static_cast<Eigen::Index>(SamplePoisson(200, meta));
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j) beta[j] = SampleGaussian(0.0, 2.0, meta);
    SyntheticRegressionOptions gen;
    gen.x_half_width = SampleUniform(0.5, 5.0, meta);
    gen.y_bound = 1e9;
    const SyntheticRegression synth = GenerateSyntheticRegression(n, beta, meta, gen);
    RegressionBounds bounds;
    bounds.x = Bounds::Repeat(static_cast<std::size_t>(p), -gen.x_half_width,
                              gen.x_half_width);
    const double y_max = synth.data.y.cwiseAbs().maxCoeff();
    bounds.y = {-y_max, y_max};
    bounds.residual_bound = 20.0;
    try {
      const RegressionRelease r = SspOlsRelease(
          synth.data, bounds, DefaultRegressionBudget(SampleUniform(0.5, 5.0, meta)), meta);
      const HybridBootstrap hb(r);
      const Eigen::VectorXd b = hb.ReplicateFromNoise(
          Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p));
      worst = std::max(worst, (b - r.beta_hat).cwiseAbs().maxCoeff());
      ++checked;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularRelease) throw;
      ++skipped;
    }
  }
  return {worst <= 1e-10, "max |beta* - beta_hat| over 100 releases = " +
                              Fmt("%.3g", worst) + " (need <= 1e-10); singular releases redrawn " +
                              std::to_string(skipped)};
}

// ---- Criterion 6.

Outcome NoiselessOracleEquivalence() {
  double worst_mle = 0.0;
  std::string worst_family;
  for (const family_oracles::Family& f : family_oracles::Families()) {
    const ModelPtr model = MakeModel(f.name, f.fixed);
    RandomStream rng(kSeed, {6, std::hash<std::string>{}(f.name)});
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd params = f.random_params(rng);
      const Eigen::Index n = 2 + (static_cast<Eigen::Index>(i) * 48) / 49;
      const Eigen::MatrixXd data = model->Sample(model->ToNatural(params), n, rng);
      const Bounds wide = Bounds::Repeat(static_cast<std::size_t>(model->dim()), -1e6, 1e6);
      const NoisyVector release = SspRelease(*model, data, wide, kNoiseless, rng);
      const Eigen::VectorXd tau = model->FromNatural(SspMle(*model, release.values, n));
      const std::vector<double> expected = f.grid_mle(data);
      for (std::size_t j = 0; j < expected.size(); ++j) {
        const double d = std::abs(tau[static_cast<Eigen::Index>(j)] - expected[j]);
        if (d > worst_mle) {
          worst_mle = d;
          worst_family = f.name;
        }
      }
    }
  }
  double worst_ols = 0.0;
  RandomStream rng(kSeed, {6, 1});
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index p = 1 + i % 4;
    const Eigen::Index n = p + 5 + i;
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j) beta[j] = SampleGaussian(0.0, 2.0, rng);
    SyntheticRegressionOptions gen;
    gen.y_bound = 1e9;
    const SyntheticRegression synth = GenerateSyntheticRegression(n, beta, rng, gen);
    RegressionBounds bounds;
    bounds.x = Bounds::Repeat(static_cast<std::size_t>(p), -gen.x_half_width,
                              gen.x_half_width);
    bounds.y = {-1e3, 1e3};
    bounds.residual_bound = 1e3;
    const RegressionRelease r =
        SspOlsRelease(synth.data, bounds, DefaultRegressionBudget(kNoiseless), rng);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < p; ++j) rows[k].push_back(synth.data.x(k, j));
      y[k] = synth.data.y[k];
    }
    const std::vector<double> expected = oracle::NormalEquationsOls(rows, y);
    for (Eigen::Index j = 0; j < p; ++j) {
      worst_ols = std::max(worst_ols, std::abs(r.beta_hat[j] - expected[j]));
    }
  }
  return {worst_mle <= 1e-4 && worst_ols <= 1e-8,
          "max |SSP-MLE - grid MLE| over 6 families x 50 instances = " +
              Fmt("%.3g", worst_mle) + " (" + worst_family + ", need <= 1e-4); " +
              "max |SSP-OLS - normal equations| over 50 instances = " +
              Fmt("%.3g", worst_ols) + " (need <= 1e-8)"};
}

// ---- Criterion 7.

Outcome BiasCorrection() {
  const double lambda = 10.0;
  const long threshold = oracle::PoissonQuantile(0.9, lambda);
  ExperimentConfig c = ParseExperimentConfig(R"({
    "experiment": "bias",
    "model": {"name": "poisson", "params": [10.0]},
    "n": [500], "epsilon": [1.0], "alpha": [0.05],
    "trials": 500, "replicates": 200,
    "bounds": {"mode": "explicit", "data": [[0, 1000]]},
    "threads": 0})");
  c.clamp_thresholds = {static_cast<double>(threshold)};
  c.seed = kSeed;
  const ExperimentOutput out = RunExperiment(c);
  const double th = static_cast<double>(threshold);
  const double raw = Find(out, "private", 0.05, 0, th).mean_abs_error;
  const double bc = Find(out, "bias-corrected", 0.05, 0, th).mean_abs_error;
  return {bc < raw && out.failed_trials == 0,
          "clamp at " + std::to_string(threshold) + ": mean |tau_bc - lambda| = " +
              Fmt("%.4f", bc) + " vs mean |tau_hat - lambda| = " + Fmt("%.4f", raw) +
              " (need bc < raw); failed trials " + std::to_string(out.failed_trials)};
}

// ---- Criterion 8.

Outcome SaComparison() {
  ExperimentConfig c = ParseExperimentConfig(R"({
    "experiment": "sa-compare",
    "model": {"name": "gaussian-known-variance", "params": [0.0], "fixed": [1.0]},
    "n": [500, 2000], "epsilon": [0.5], "alpha": [0.05],
    "trials": 500, "replicates": 200,
    "bounds": {"mode": "explicit", "data": [[-20, 20]]},
    "sa": {"x_min": -20, "x_max": 20, "l_min": -10, "l_max": 10, "var_max": 50},
    "threads": 0})");
  c.seed = kSeed;
  const ExperimentOutput out = RunExperiment(c);
  bool pass = out.failed_trials == 0;
  std::string detail;
  for (std::size_t n : c.n_grid) {
    const SummaryRecord& pb = Find(out, "pb", 0.05, n);
    const SummaryRecord& sa = Find(out, "sa", 0.05, n);
    pass = pass && pb.mean_width < sa.mean_width && pb.coverage >= 0.92 &&
           pb.coverage <= 0.98;
    detail += "n=" + std::to_string(n) + ": PB width " + Fmt("%.4f", pb.mean_width) +
              " vs S&A " + Fmt("%.4f", sa.mean_width) + ", PB coverage " +
              Fmt("%.3f", pb.coverage) + "; ";
  }
  return {pass, detail + "need PB width < S&A width and PB coverage in [0.92, 0.98]"};
}

// ---- Criterion 10.

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome CliDeterminism() {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("dpboot_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::map<std::string, std::string> configs = {
      {"coverage", R"({"model": {"name": "poisson", "params": [2.3]}, "n": [60],
          "epsilon": [0.5], "coverage": [0.9, 0.95], "trials": 20, "replicates": 50,
          "seed": 7})"},
      {"width", R"({"model": {"name": "gamma-scale", "params": [2.0], "fixed": [3.0]},
          "n": [80, 200], "epsilon": [0.5], "alpha": [0.05], "trials": 10,
          "replicates": 40, "seed": 7})"},
      {"bias", R"({"model": {"name": "poisson", "params": [10.0]}, "n": [100],
          "epsilon": [1.0], "alpha": [0.05], "clamp_quantiles": [0.75, 0.9],
          "trials": 10, "replicates": 40, "seed": 7})"},
      {"sa-compare", R"({"model": {"name": "gaussian-known-variance", "params": [0.0],
          "fixed": [1.0]}, "n": [300], "epsilon": [0.5], "alpha": [0.05],
          "trials": 10, "replicates": 40,
          "bounds": {"mode": "explicit", "data": [[-20, 20]]}, "seed": 7})"},
      {"ols", R"({"n": [500], "epsilon": [1.0], "alpha": [0.05], "target": -1,
          "trials": 10, "replicates": 40, "seed": 7})"},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [kind, json] : configs) {
    const fs::path cfg = dir / (kind + ".json");
    std::ofstream(cfg) << json;
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path out = dir / (kind + "_" + std::to_string(outputs.size()) + ".csv");
      const std::string cmd = std::string(DPBOOT_CLI_PATH) + " " + kind + " --config " +
                              cfg.string() + " --out " + out.string() + " --threads " +
                              threads + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        outputs.push_back("<run failed>");
      } else {
        outputs.push_back(ReadFile(out));
      }
    }
    const bool same = outputs[0] != "<run failed>" && !outputs[0].empty() &&
                      outputs[0] == outputs[1] && outputs[0] == outputs[2];
    pass = pass && same;
    detail += kind + ":" + (same ? "identical" : "DIFFERENT") + " (" +
              std::to_string(outputs[0].size()) + " bytes); ";
  }
  fs::remove_all(dir);
  return {pass, detail + "three runs each, same seed, threads 1/1/3"};
}

std::vector<Criterion> Criteria() {
  return {
      {1, "coverage calibration", 300.0, CoverageCalibration},
      {2, "private Fisher undercoverage", 300.0, FisherUndercoverage},
      {3, "width convergence", 900.0, WidthConvergence},
      {4, "OLS pivot asymptotics", 600.0, OlsPivotAsymptotics},
      {5, "hybrid bootstrap identity", 1.0, HybridIdentity},
      {6, "noiseless oracle equivalence", 60.0, NoiselessOracleEquivalence},
      {7, "bias correction", 180.0, BiasCorrection},
      {8, "subsample-and-aggregate comparison", 300.0, SaComparison},
      {9, "tail balance", 300.0, TailBalance},
      {10, "CLI determinism", 0.0, CliDeterminism},
  };
}

}  // namespace
}  // namespace dpboot

int main(int argc, char** argv) {
  CLI::App app("dpboot acceptance suite");
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable; default all)");
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const dpboot::Criterion& c : dpboot::Criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    dpboot::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = dpboot::Fmt("%.1f s", secs);
    if (c.runtime_budget_s > 0.0) {
      const bool in_time = secs <= c.runtime_budget_s;
      o.pass = o.pass && in_time;
      timing += dpboot::Fmt(" (budget %.0f s", c.runtime_budget_s) +
                (in_time ? ")" : ", exceeded)");
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " [" << c.title
              << "]: " << o.detail << "; runtime " << timing << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
