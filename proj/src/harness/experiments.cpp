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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dpboot/baselines.hpp"
#include "dpboot/error.hpp"
#include "dpboot/harness.hpp"
#include "dpboot/ols.hpp"
#include "dpboot/parallel.hpp"

namespace dpboot {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxRedraws = 10;
constexpr std::size_t kQuantileReferenceSize = 100000;

// Substream layout under the master seed.
constexpr std::uint64_t kSurrogateStream = 0;
constexpr std::uint64_t kTrialStream = 1;
constexpr std::uint64_t kReferenceStream = 2;

int ResolveThreads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ResolvedModel {
  ModelPtr model;
  Eigen::VectorXd params;
  Eigen::VectorXd theta;
};

ResolvedModel ResolveModel(const ExperimentConfig& config) {
  ResolvedModel out;
  out.model = MakeModel(config.model.name, config.model.fixed);
  if (config.model.params.size() != static_cast<std::size_t>(out.model->dim())) {
    Fail(ErrorCode::kInvalidConfig,
         "model.params needs " + std::to_string(out.model->dim()) + " values");
  }
  out.params = Eigen::Map<const Eigen::VectorXd>(
      config.model.params.data(),
      static_cast<Eigen::Index>(config.model.params.size()));
  out.theta = out.model->ToNatural(out.params);
  if (!out.model->InDomain(out.theta)) {
    Fail(ErrorCode::kInvalidConfig, "model.params outside the parameter space");
  }
  return out;
}

ModelBounds ResolveBounds(const ExperimentConfig& config,
                          const ResolvedModel& rm, const RandomStream& master) {
  const BoundsConfig& bc = config.bounds;
  if (bc.mode == BoundsMode::kSurrogate) {
    RandomStream rng = master.Child(kSurrogateStream);
    return SurrogateBounds(*rm.model, rm.theta, bc.surrogate_size,
                           bc.range_multiplier, rng);
  }
  ModelBounds out;
  out.data = Bounds(bc.data).Scaled(bc.range_multiplier);
  if (out.data.dim() != static_cast<std::size_t>(rm.model->data_dim())) {
    Fail(ErrorCode::kInvalidConfig, "bounds.data needs one interval per data column");
  }
  if (bc.statistic.empty()) {
    out.statistic = StatisticBoundsFromData(*rm.model, out.data);
  } else {
    out.statistic = Bounds(bc.statistic).Scaled(bc.range_multiplier);
  }
  return out;
}

std::vector<int> Coordinates(int target, int dim) {
  if (target < 0) {
    std::vector<int> all(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) all[static_cast<std::size_t>(j)] = j;
    return all;
  }
  if (target >= dim) Fail(ErrorCode::kInvalidConfig, "target coordinate out of range");
  return {target};
}

TrialRecord MakeRecord(std::size_t trial, std::size_t n, double epsilon,
                       double alpha, std::string method, int coordinate,
                       double setting, double truth, double estimate,
                       const ConfidenceInterval& ci) {
  TrialRecord r;
  r.trial = trial;
  r.n = n;
  r.epsilon = epsilon;
  r.alpha = alpha;
  r.method = std::move(method);
  r.coordinate = coordinate;
  r.setting = setting;
  r.truth = truth;
  r.estimate = estimate;
  r.ci_lo = ci.lo;
  r.ci_hi = ci.hi;
  ClassifyCoverage(r);
  return r;
}

// A trial whose private fit failed outright: recorded, never covered.
TrialRecord FailedRecord(std::size_t trial, std::size_t n, double epsilon,
                         double setting) {
  TrialRecord r;
  r.trial = trial;
  r.n = n;
  r.epsilon = epsilon;
  r.alpha = kNaN;
  r.method = "failed";
  r.setting = setting;
  r.truth = kNaN;
  r.estimate = kNaN;
  r.ci_lo = kNaN;
  r.ci_hi = kNaN;
  return r;
}

struct Setting {
  std::size_t n = 0;
  double epsilon = 0.0;
  double threshold = 0.0;
};

using TrialBody = std::function<std::vector<TrialRecord>(
    const Setting&, std::size_t trial, RandomStream& rng)>;

// Runs every (setting, trial) pair, possibly in parallel, and assembles the
// rows in (setting, trial) order.
ExperimentOutput RunTrials(const ExperimentConfig& config,
                           const std::vector<Setting>& settings,
                           const RandomStream& master, const TrialBody& body) {
  const std::size_t trials = config.trials;
  const std::size_t jobs = settings.size() * trials;
  std::vector<std::vector<TrialRecord>> slots(jobs);
  std::vector<char> failed(jobs, 0);
  ParallelFor(jobs, ResolveThreads(config.threads), [&](std::size_t job) {
    const std::size_t s = job / trials;
    const std::size_t t = job % trials;
    RandomStream rng = master.Child({kTrialStream, s, t});
    try {
      slots[job] = body(settings[s], t, rng);
    } catch (const Error&) {
      slots[job] = {FailedRecord(t, settings[s].n, settings[s].epsilon,
                                 settings[s].threshold)};
      failed[job] = 1;
    }
  });
  ExperimentOutput out;
  for (std::size_t job = 0; job < jobs; ++job) {
    out.failed_trials += failed[job] ? 1 : 0;
    for (TrialRecord& r : slots[job]) out.trials.push_back(std::move(r));
  }
  out.summary = Summarize(out.trials);
  return out;
}

std::vector<Setting> NEpsilonGrid(const ExperimentConfig& config) {
  std::vector<Setting> out;
  for (std::size_t n : config.n_grid) {
    for (double eps : config.epsilon_grid) out.push_back({n, eps, 0.0});
  }
  return out;
}

BootstrapOptions TrialBootstrapOptions() {
  BootstrapOptions opts;
  opts.threads = 1;  // parallelism lives at the trial level
  opts.max_redraws = kMaxRedraws;
  return opts;
}

// Coverage and width share one protocol: PB (Efron), private Fisher, and
// non-private Fisher on the unclamped data, for every alpha on the same
// bootstrap replicates.
ExperimentOutput RunFamilyIntervals(const ExperimentConfig& config) {
  const RandomStream master(config.seed);
  const ResolvedModel rm = ResolveModel(config);
  const ModelBounds bounds = ResolveBounds(config, rm, master);
  const std::vector<int> coords = Coordinates(config.target, rm.model->dim());
  return RunTrials(
      config, NEpsilonGrid(config), master,
      [&](const Setting& s, std::size_t t, RandomStream& rng) {
        const auto n = static_cast<Eigen::Index>(s.n);
        RandomStream data_rng = rng.Child(0);
        const Eigen::MatrixXd data = rm.model->Sample(rm.theta, n, data_rng);

        const SspMleEstimator estimator(rm.model, bounds, s.epsilon);
        RandomStream fit_rng = rng.Child(1);
        const BootstrapRun run = RunParametricBootstrap(
            estimator, data, config.replicates, fit_rng, TrialBootstrapOptions());

        const Eigen::VectorXd theta_np =
            SspMle(*rm.model, SufficientStatisticTotal(*rm.model, data), n);
        const Eigen::VectorXd tau_np = rm.model->FromNatural(theta_np);

        std::vector<TrialRecord> rows;
        for (double alpha : config.alpha_grid) {
          for (int j : coords) {
            const BootstrapResult marginal = Marginal(run, j);
            const double truth = rm.params[j];
            TrialRecord pb = MakeRecord(t, s.n, s.epsilon, alpha, "pb", j, 0.0,
                                        truth, marginal.tau_hat,
                                        EfronPercentileInterval(marginal, alpha));
            pb.replicate_failures = run.failures;
            rows.push_back(std::move(pb));
            rows.push_back(MakeRecord(
                t, s.n, s.epsilon, alpha, "fisher-private", j, 0.0, truth,
                marginal.tau_hat,
                FisherCi(marginal.tau_hat, (*run.point.sigma)[j], alpha)));
            rows.push_back(MakeRecord(
                t, s.n, s.epsilon, alpha, "fisher-nonprivate", j, 0.0, truth,
                tau_np[j],
                FisherCi(tau_np[j], ConventionalStdErr(*rm.model, theta_np, n, j),
                         alpha)));
          }
        }
        return rows;
      });
}

}  // namespace

ModelBounds SurrogateBounds(const ExpFamModel& model, const Eigen::VectorXd& theta,
                            std::size_t size, double range_multiplier,
                            RandomStream& rng) {
  if (size < 2) Fail(ErrorCode::kInvalidParameter, "surrogate size must be >= 2");
  const Eigen::MatrixXd sample =
      model.Sample(theta, static_cast<Eigen::Index>(size), rng);
  std::vector<Interval> data(static_cast<std::size_t>(sample.cols()));
  for (Eigen::Index c = 0; c < sample.cols(); ++c) {
    data[static_cast<std::size_t>(c)] = {sample.col(c).minCoeff(),
                                         sample.col(c).maxCoeff()};
  }
  const int dim = model.dim();
  std::vector<Interval> stat(static_cast<std::size_t>(dim),
                             {std::numeric_limits<double>::infinity(),
                              -std::numeric_limits<double>::infinity()});
  std::vector<double> x(static_cast<std::size_t>(sample.cols()));
  std::vector<double> t(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < sample.rows(); ++i) {
    for (Eigen::Index c = 0; c < sample.cols(); ++c) {
      x[static_cast<std::size_t>(c)] = sample(i, c);
    }
    model.SufficientStatistic(x, t);
    for (std::size_t j = 0; j < t.size(); ++j) {
      stat[j].lower = std::min(stat[j].lower, t[j]);
      stat[j].upper = std::max(stat[j].upper, t[j]);
    }
  }
  ModelBounds out;
  out.data = Bounds(std::move(data)).Scaled(range_multiplier);
  out.statistic = Bounds(std::move(stat)).Scaled(range_multiplier);
  return out;
}

Bounds StatisticBoundsFromData(const ExpFamModel& model, const Bounds& data) {
  if (!model.IdentityStatistic()) {
    Fail(ErrorCode::kInvalidBounds,
         std::string(model.name()) +
             " needs explicit statistic bounds (T is not the identity)");
  }
  if (data.dim() != static_cast<std::size_t>(model.dim())) {
    Fail(ErrorCode::kInvalidBounds, "data bounds do not match the model");
  }
  return data;
}

SspMleEstimator::SspMleEstimator(ModelPtr model, ModelBounds bounds,
                                 double epsilon)
    : model_(std::move(model)), bounds_(std::move(bounds)), epsilon_(epsilon) {
  if (!model_) Fail(ErrorCode::kInvalidParameter, "model is null");
  ValidateEpsilon(epsilon_);
  if (bounds_.data.dim() != static_cast<std::size_t>(model_->data_dim()) ||
      bounds_.statistic.dim() != static_cast<std::size_t>(model_->dim())) {
    Fail(ErrorCode::kInvalidBounds, "bounds do not match the model");
  }
}

Estimate SspMleEstimator::Fit(const Eigen::MatrixXd& data,
                              RandomStream& rng) const {
  const Eigen::MatrixXd clamped = ClampData(data, bounds_.data);
  const NoisyVector release =
      SspRelease(*model_, clamped, bounds_.statistic, epsilon_, rng);
  const Eigen::Index n = data.rows();
  Estimate est;
  est.theta = SspMle(*model_, release.values, n);
  est.tau = model_->FromNatural(est.theta);
  Eigen::VectorXd sigma(model_->dim());
  for (int j = 0; j < model_->dim(); ++j) {
    sigma[j] = ConventionalStdErr(*model_, est.theta, n, j);
  }
  est.sigma = std::move(sigma);
  return est;
}

Eigen::MatrixXd SspMleEstimator::Resample(const Estimate& fit, Eigen::Index n,
                                          RandomStream& rng) const {
  return model_->Sample(fit.theta, n, rng);
}

ExperimentOutput RunCoverageExperiment(const ExperimentConfig& config) {
  return RunFamilyIntervals(config);
}

ExperimentOutput RunWidthExperiment(const ExperimentConfig& config) {
  return RunFamilyIntervals(config);
}

ExperimentOutput RunBiasExperiment(const ExperimentConfig& config) {
  const RandomStream master(config.seed);
  const ResolvedModel rm = ResolveModel(config);
  if (rm.model->dim() != 1 || !rm.model->IdentityStatistic()) {
    Fail(ErrorCode::kInvalidConfig,
         "bias experiment needs a one-parameter model with T(x) = x");
  }
  const ModelBounds base = ResolveBounds(config, rm, master);
  const double lower = base.data[0].lower;

  std::vector<double> thresholds = config.clamp_thresholds;
  if (!config.clamp_quantiles.empty()) {
    RandomStream ref_rng = master.Child(kReferenceStream);
    const Eigen::MatrixXd reference = rm.model->Sample(
        rm.theta, static_cast<Eigen::Index>(kQuantileReferenceSize), ref_rng);
    const std::span<const double> values(reference.data(),
                                         static_cast<std::size_t>(reference.size()));
    for (double q : config.clamp_quantiles) {
      // EmpiricalQuantile(gamma) is the upper-gamma quantile.
      thresholds.push_back(EmpiricalQuantile(values, 1.0 - q));
    }
  }
  for (double th : thresholds) {
    if (!(th >= lower)) {
      Fail(ErrorCode::kInvalidConfig, "clamp threshold below the data lower bound");
    }
  }

  std::vector<Setting> settings;
  for (double th : thresholds) {
    for (std::size_t n : config.n_grid) {
      for (double eps : config.epsilon_grid) settings.push_back({n, eps, th});
    }
  }
  return RunTrials(
      config, settings, master,
      [&](const Setting& s, std::size_t t, RandomStream& rng) {
        const auto n = static_cast<Eigen::Index>(s.n);
        RandomStream data_rng = rng.Child(0);
        const Eigen::MatrixXd data = rm.model->Sample(rm.theta, n, data_rng);
        ModelBounds bounds;
        bounds.data = Bounds({Interval{lower, s.threshold}});
        bounds.statistic = StatisticBoundsFromData(*rm.model, bounds.data);
        const SspMleEstimator estimator(rm.model, bounds, s.epsilon);
        RandomStream fit_rng = rng.Child(1);
        const BootstrapRun run = RunParametricBootstrap(
            estimator, data, config.replicates, fit_rng, TrialBootstrapOptions());
        const BootstrapResult marginal = Marginal(run, 0);
        const BiasCorrection bc = BiasCorrect(marginal);
        const double truth = rm.params[0];
        std::vector<TrialRecord> rows;
        for (double alpha : config.alpha_grid) {
          const ConfidenceInterval ci = EfronPercentileInterval(marginal, alpha);
          TrialRecord raw = MakeRecord(t, s.n, s.epsilon, alpha, "private", 0,
                                       s.threshold, truth, marginal.tau_hat, ci);
          raw.replicate_failures = run.failures;
          rows.push_back(std::move(raw));
          TrialRecord corrected = MakeRecord(
              t, s.n, s.epsilon, alpha, "bias-corrected", 0, s.threshold, truth,
              bc.tau_bc, {ci.lo - bc.bias, ci.hi - bc.bias});
          corrected.replicate_failures = run.failures;
          rows.push_back(std::move(corrected));
        }
        return rows;
      });
}

ExperimentOutput RunSaComparison(const ExperimentConfig& config) {
  const RandomStream master(config.seed);
  const ResolvedModel rm = ResolveModel(config);
  if (rm.model->dim() != 1 || rm.model->data_dim() != 1) {
    Fail(ErrorCode::kInvalidConfig,
         "sa-compare needs a one-parameter model on scalar data");
  }
  const ModelBounds bounds = ResolveBounds(config, rm, master);
  return RunTrials(
      config, NEpsilonGrid(config), master,
      [&](const Setting& s, std::size_t t, RandomStream& rng) {
        const auto n = static_cast<Eigen::Index>(s.n);
        RandomStream data_rng = rng.Child(0);
        const Eigen::MatrixXd data = rm.model->Sample(rm.theta, n, data_rng);
        const SspMleEstimator estimator(rm.model, bounds, s.epsilon);
        RandomStream fit_rng = rng.Child(1);
        const BootstrapRun run = RunParametricBootstrap(
            estimator, data, config.replicates, fit_rng, TrialBootstrapOptions());
        const BootstrapResult marginal = Marginal(run, 0);
        const double truth = rm.params[0];
        const std::span<const double> column(data.data(), s.n);

        std::vector<TrialRecord> rows;
        for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
          const double alpha = config.alpha_grid[a];
          TrialRecord pb = MakeRecord(t, s.n, s.epsilon, alpha, "pb", 0, 0.0,
                                      truth, marginal.tau_hat,
                                      EfronPercentileInterval(marginal, alpha));
          pb.replicate_failures = run.failures;
          rows.push_back(std::move(pb));

          SaConfig sa;
          sa.subsets = config.sa.subsets;
          sa.x_min = config.sa.x_min;
          sa.x_max = config.sa.x_max;
          sa.l_min = config.sa.l_min;
          sa.l_max = config.sa.l_max;
          sa.var_max = config.sa.var_max;
          sa.epsilon = s.epsilon;
          sa.alpha = alpha;
          sa.inner_resamples = config.sa.inner_resamples;
          RandomStream sa_rng = rng.Child({2, a});
          const SaResult res = SubsampleAggregateCi(column, SampleMean, sa, sa_rng);
          rows.push_back(MakeRecord(t, s.n, s.epsilon, alpha, "sa", 0, 0.0, truth,
                                    res.theta_dp, res.ci));
        }
        return rows;
      });
}

ExperimentOutput RunOlsCoverage(const ExperimentConfig& config) {
  const RandomStream master(config.seed);
  const OlsSettings& os = config.ols;
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(
      os.beta.data(), static_cast<Eigen::Index>(os.beta.size()));
  const Eigen::Index p = beta.size();
  const std::vector<int> coords = Coordinates(config.target, static_cast<int>(p));

  RegressionBounds bounds;
  bounds.x = Bounds::Repeat(static_cast<std::size_t>(p), -os.x_half_width,
                            os.x_half_width);
  bounds.y = {-os.y_bound, os.y_bound};
  bounds.residual_bound = os.residual_bound;

  SyntheticRegressionOptions gen;
  gen.x_half_width = os.x_half_width;
  gen.noise_half_width = os.noise_half_width;
  gen.y_bound = os.y_bound;

  const double split_total =
      os.budget_split[0] + os.budget_split[1] + os.budget_split[2];

  return RunTrials(
      config, NEpsilonGrid(config), master,
      [&](const Setting& s, std::size_t t, RandomStream& rng) {
        RandomStream data_rng = rng.Child(0);
        const SyntheticRegression synth = GenerateSyntheticRegression(
            static_cast<Eigen::Index>(s.n), beta, data_rng, gen);
        PrivacyBudget budget;
        budget.Add(kGramBudget, s.epsilon * os.budget_split[0] / split_total);
        budget.Add(kXtyBudget, s.epsilon * os.budget_split[1] / split_total);
        budget.Add(kSigma2Budget, s.epsilon * os.budget_split[2] / split_total);
        RandomStream release_rng = rng.Child(1);
        const RegressionRelease release =
            SspOlsRelease(synth.data, bounds, budget, release_rng);
        const HybridBootstrap hybrid(release);
        Estimate point;
        point.theta = release.beta_hat;
        point.tau = release.beta_hat;
        RandomStream boot_rng = rng.Child(2);
        const BootstrapRun run =
            RunReplicateBootstrap(point, hybrid.Generator(), config.replicates,
                                  boot_rng, TrialBootstrapOptions());
        const Eigen::VectorXd beta_np = ClassicalOls(synth.data);

        std::vector<TrialRecord> rows;
        for (double alpha : config.alpha_grid) {
          for (int j : coords) {
            const BootstrapResult marginal = Marginal(run, j);
            TrialRecord pb = MakeRecord(t, s.n, s.epsilon, alpha, "pb", j, 0.0,
                                        beta[j], release.beta_hat[j],
                                        EfronPercentileInterval(marginal, alpha));
            pb.replicate_failures = run.failures;
            rows.push_back(std::move(pb));
            rows.push_back(MakeRecord(t, s.n, s.epsilon, alpha, "fisher-private",
                                      j, 0.0, beta[j], release.beta_hat[j],
                                      OlsFisherCi(release, j, alpha)));
            rows.push_back(MakeRecord(t, s.n, s.epsilon, alpha,
                                      "fisher-nonprivate", j, 0.0, beta[j],
                                      beta_np[j],
                                      ClassicalOlsFisherCi(synth.data, j, alpha)));
          }
        }
        return rows;
      });
}

ExperimentOutput RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  switch (config.kind) {
    case ExperimentKind::kCoverage: return RunCoverageExperiment(config);
    case ExperimentKind::kWidth: return RunWidthExperiment(config);
    case ExperimentKind::kBias: return RunBiasExperiment(config);
    case ExperimentKind::kSaCompare: return RunSaComparison(config);
    case ExperimentKind::kOlsCoverage: return RunOlsCoverage(config);
  }
  Fail(ErrorCode::kInvalidConfig, "unknown experiment kind");
}

}  // namespace dpboot
