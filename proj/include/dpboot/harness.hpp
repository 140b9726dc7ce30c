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

// Monte Carlo experiment harness: declarative configs, the five experiment
// runners, single-dataset estimation, and the versioned CSV format they emit.

#ifndef DPBOOT_HARNESS_HPP_
#define DPBOOT_HARNESS_HPP_

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpboot/bootstrap.hpp"
#include "dpboot/expfam.hpp"
#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"

namespace dpboot {

enum class ExperimentKind { kCoverage, kWidth, kBias, kSaCompare, kOlsCoverage };

std::string_view ExperimentKindName(ExperimentKind kind);
ExperimentKind ParseExperimentKind(std::string_view name);

enum class BoundsMode { kSurrogate, kExplicit };

struct ModelConfig {
  std::string name;
  std::vector<double> params;  // true parameters, conventional scale
  std::vector<double> fixed;   // known parameters (sigma, shape, variances)
};

struct BoundsConfig {
  BoundsMode mode = BoundsMode::kSurrogate;
  std::size_t surrogate_size = 1000;
  double range_multiplier = 1.0;
  std::vector<Interval> data;       // explicit mode
  std::vector<Interval> statistic;  // explicit mode; derived when empty
};

struct SaSettings {
  double x_min = -20.0;
  double x_max = 20.0;
  double l_min = -10.0;
  double l_max = 10.0;
  double var_max = 50.0;
  std::size_t subsets = 0;
  std::size_t inner_resamples = 100;
};

struct OlsSettings {
  std::vector<double> beta{1.0, 1.0};
  double x_half_width = 5.0;
  double noise_half_width = 10.0;
  double y_bound = 150.0;
  double residual_bound = 20.0;
  std::vector<double> budget_split{1.0, 1.0, 1.0};  // relative (gram, xty, sigma2)
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kCoverage;
  ModelConfig model;
  int target = 0;
  std::vector<std::size_t> n_grid{100};
  std::vector<double> epsilon_grid{0.5};
  std::vector<double> alpha_grid{0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01};
  std::size_t trials = 1000;
  std::size_t replicates = 200;
  BoundsConfig bounds;
  std::vector<double> clamp_thresholds;
  std::vector<double> clamp_quantiles;
  SaSettings sa;
  OlsSettings ols;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output;

  // Throws kInvalidConfig on empty grids, T < 1, bad epsilons, etc.
  void Validate() const;
};

// Parses the JSON experiment config. Nominal coverage levels may be given as
// "coverage": [...] (alpha = 1 - level) or directly as "alpha": [...].
// Checks syntax and types only; Validate() (called by RunExperiment) checks
// the values, so the kind may still be overridden after parsing.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::string method;
  int coordinate = 0;
  double setting = 0.0;  // clamp threshold (bias) or 0
  double truth = 0.0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covered = false;
  bool failed_low = false;   // truth < ci_lo
  bool failed_high = false;  // truth > ci_hi
  std::size_t replicate_failures = 0;

  double width() const { return ci_hi - ci_lo; }
  double abs_error() const { return std::abs(estimate - truth); }
};

// Fills covered / failed_low / failed_high from truth and the interval.
void ClassifyCoverage(TrialRecord& record);

struct SummaryRecord {
  std::size_t trials = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::string method;
  int coordinate = 0;
  double setting = 0.0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double mean_abs_error = 0.0;
  double mean_ci_lo = 0.0;
  double mean_ci_hi = 0.0;
  double coverage = 0.0;
  std::size_t failed_low = 0;
  std::size_t failed_high = 0;
  double mean_width = 0.0;
  std::size_t replicate_failures = 0;
};

struct ExperimentOutput {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRecord> summary;
  std::size_t failed_trials = 0;
};

// Groups trial rows by (n, epsilon, alpha, method, coordinate, setting) in
// first-appearance order.
std::vector<SummaryRecord> Summarize(const std::vector<TrialRecord>& trials);

struct ModelBounds {
  Bounds data;
  Bounds statistic;
};

// Bounds from an independent sample of `size` draws at theta: per-column data
// range and per-coordinate range of T, both expanded about their midpoints by
// `range_multiplier`.
ModelBounds SurrogateBounds(const ExpFamModel& model, const Eigen::VectorXd& theta,
                            std::size_t size, double range_multiplier,
                            RandomStream& rng);

// T-bounds implied by data bounds for models with T(x) = x.
Bounds StatisticBoundsFromData(const ExpFamModel& model, const Bounds& data);

// SSP-MLE on data clamped to `bounds`. tau = conventional parameters,
// sigma = their plug-in delta-method standard errors.
class SspMleEstimator final : public PrivateEstimator {
 public:
  SspMleEstimator(ModelPtr model, ModelBounds bounds, double epsilon);

  Estimate Fit(const Eigen::MatrixXd& data, RandomStream& rng) const override;
  Eigen::MatrixXd Resample(const Estimate& fit, Eigen::Index n,
                           RandomStream& rng) const override;

 private:
  ModelPtr model_;
  ModelBounds bounds_;
  double epsilon_;
};

ExperimentOutput RunCoverageExperiment(const ExperimentConfig& config);
ExperimentOutput RunWidthExperiment(const ExperimentConfig& config);
ExperimentOutput RunBiasExperiment(const ExperimentConfig& config);
ExperimentOutput RunSaComparison(const ExperimentConfig& config);
ExperimentOutput RunOlsCoverage(const ExperimentConfig& config);
ExperimentOutput RunExperiment(const ExperimentConfig& config);

inline constexpr char kCsvSchemaTag[] = "dpboot_v1";

void WriteCsv(const ExperimentOutput& output, std::ostream& out);
std::string FormatCsv(const ExperimentOutput& output);

// Headerless numeric CSV, one observation per line.
Eigen::MatrixXd ReadNumericCsv(std::istream& in);
Eigen::MatrixXd ReadNumericCsvFile(const std::string& path);

// Single-dataset analysis. Config JSON selects either "model" (exponential
// family) or "regression"; returns a JSON document with the private
// estimate, bootstrap intervals, Fisher intervals and bias correction.
std::string EstimateFromData(std::string_view config_json,
                             const Eigen::MatrixXd& data, std::uint64_t seed,
                             int threads);

}  // namespace dpboot

#endif  // DPBOOT_HARNESS_HPP_
