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

// Generic parametric bootstrap: one private fit on the real data, then B
// refits on data simulated from the fitted model, each with fresh privacy
// noise. Everything after the first fit is post-processing, so the replicates
// cost no additional privacy budget.

#ifndef DPBOOT_BOOTSTRAP_HPP_
#define DPBOOT_BOOTSTRAP_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpboot/random.hpp"

namespace dpboot {

// Output of a private estimator: the full parameter (used to resample), the
// estimation targets tau, and optionally standard errors for each target.
struct Estimate {
  Eigen::VectorXd theta;
  Eigen::VectorXd tau;
  std::optional<Eigen::VectorXd> sigma;
};

class PrivateEstimator {
 public:
  virtual ~PrivateEstimator() = default;

  // The only access to data. Must be deterministic given (data, rng).
  virtual Estimate Fit(const Eigen::MatrixXd& data, RandomStream& rng) const = 0;

  // n synthetic observations from P_theta, theta = fit.theta (all
  // coordinates, nuisance parameters included).
  virtual Eigen::MatrixXd Resample(const Estimate& fit, Eigen::Index n,
                                   RandomStream& rng) const = 0;
};

// For estimators that simulate replicates directly instead of refitting on
// resampled data (the hybrid OLS bootstrap).
using ReplicateGenerator = std::function<Estimate(RandomStream&)>;

struct BootstrapOptions {
  int threads = 1;
  // Extra attempts for a replicate that throws dpboot::Error; attempt a > 0
  // draws from substream [b, a].
  int max_redraws = 0;
};

// All targets at once. replicates holds the successful replicates in index
// order.
struct BootstrapRun {
  Estimate point;
  std::vector<Estimate> replicates;
  std::size_t B = 0;
  std::size_t failures = 0;
};

// One target coordinate.
struct BootstrapResult {
  double tau_hat = 0.0;
  std::optional<double> sigma_hat;
  std::vector<double> replicates;
  std::optional<std::vector<double>> sigma_replicates;
  std::size_t B = 0;
  std::size_t failures = 0;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool Contains(double v) const { return lo <= v && v <= hi; }
};

// Replicate b draws only from rng.Child(b). The real-data fit uses rng itself.
BootstrapRun RunParametricBootstrap(const PrivateEstimator& estimator,
                                    const Eigen::MatrixXd& data, std::size_t B,
                                    RandomStream& rng,
                                    const BootstrapOptions& options = {});

BootstrapRun RunReplicateBootstrap(const Estimate& point,
                                   const ReplicateGenerator& generate,
                                   std::size_t B, RandomStream& rng,
                                   const BootstrapOptions& options = {});

BootstrapResult Marginal(const BootstrapRun& run, Eigen::Index coordinate);

// [tau - xi_{a/2}, tau - xi_{1-a/2}], xi_g the (1-g) quantile of tau* - tau.
ConfidenceInterval PivotalInterval(const BootstrapResult& result, double alpha);

// Pivot (tau* - tau) / sigma*. Replicates with sigma* <= 0 are skipped; their
// number is reported through `excluded` when non-null.
ConfidenceInterval StudentizedPivotalInterval(const BootstrapResult& result,
                                              double alpha,
                                              std::size_t* excluded = nullptr);

// [zeta_{1-a/2}, zeta_{a/2}], zeta_g the (1-g) quantile of tau*.
ConfidenceInterval EfronPercentileInterval(const BootstrapResult& result,
                                           double alpha);

struct BiasCorrection {
  double bias = 0.0;
  double tau_bc = 0.0;
};

// bias = mean(tau*) - tau_hat; tau_bc = tau_hat - bias.
BiasCorrection BiasCorrect(const BootstrapResult& result);

}  // namespace dpboot

#endif  // DPBOOT_BOOTSTRAP_HPP_
