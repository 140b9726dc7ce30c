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

// Exponential-family models p(x; theta) = h(x) exp(theta^T T(x) - A(theta)) in
// natural parameters, and the sufficient-statistic-perturbation estimator:
// release T(x_{1:n}) + Laplace noise once, then solve the MLE on the noisy
// statistic as post-processing.

#ifndef DPBOOT_EXPFAM_HPP_
#define DPBOOT_EXPFAM_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"

namespace dpboot {

// Distance by which the mean-map range is shrunk before inverting a noisy
// statistic that fell outside it.
inline constexpr double kFeasibleMargin = 1e-6;

class ExpFamModel {
 public:
  virtual ~ExpFamModel() = default;

  virtual std::string_view name() const = 0;
  // Number of natural parameters (= length of T(x)).
  virtual int dim() const = 0;
  // Number of columns in one observation.
  virtual int data_dim() const { return 1; }
  virtual std::vector<std::string> param_names() const = 0;

  // T(x) for one observation x (length data_dim) into t (length dim).
  virtual void SufficientStatistic(std::span<const double> x,
                                   std::span<double> t) const = 0;
  // True when T(x) = x, which lets totals skip the per-row dispatch.
  virtual bool IdentityStatistic() const { return false; }

  virtual bool InDomain(const Eigen::VectorXd& theta) const = 0;
  virtual double LogPartition(const Eigen::VectorXd& theta) const = 0;
  // A'(theta), the mean of T(x).
  virtual Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const = 0;
  // A''(theta), the per-observation Fisher information.
  virtual Eigen::MatrixXd Hessian(const Eigen::VectorXd& theta) const = 0;

  // Moves a mean statistic into the mean-map range shrunk by kFeasibleMargin.
  virtual Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const = 0;
  // Inverse mean map, when it is available analytically. `mean` is feasible.
  virtual std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& /*mean*/) const {
    return std::nullopt;
  }
  // Starting point for Newton's method.
  virtual Eigen::VectorXd InitialTheta() const = 0;

  // n i.i.d. draws, one row per observation.
  virtual Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                                 RandomStream& rng) const = 0;

  // Conventional parameterization (p, lambda, mu, (mu, sigma^2), scale, ...).
  virtual Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const = 0;
  virtual Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const = 0;
  // d params / d theta.
  virtual Eigen::MatrixXd ConventionalJacobian(
      const Eigen::VectorXd& theta) const = 0;
};

using ModelPtr = std::shared_ptr<const ExpFamModel>;

ModelPtr MakeBernoulli();
ModelPtr MakePoisson();
ModelPtr MakeGaussianKnownVariance(double sigma);
ModelPtr MakeGaussian();
ModelPtr MakeGammaScale(double shape);
ModelPtr MakeMultivariateGaussianMean(std::vector<double> variances);

// Catalog lookup by name: "bernoulli", "poisson", "gaussian-known-variance"
// (fixed: sigma), "gaussian", "gamma-scale" (fixed: shape), "mvn-mean"
// (fixed: one variance per dimension).
ModelPtr MakeModel(std::string_view name, std::span<const double> fixed = {});
std::vector<std::string> CatalogNames();

// Sum over rows of T(x_i). When `t_bounds` is given each T(x_i) coordinate is
// clamped into it first, which is what makes the bound on the sensitivity hold.
Eigen::VectorXd SufficientStatisticTotal(const ExpFamModel& model,
                                         const Eigen::MatrixXd& data,
                                         const Bounds* t_bounds = nullptr);

// T(x_{1:n}) + Lap(0, Delta / epsilon)^dim, Delta the sum of T-bound widths.
NoisyVector SspRelease(const ExpFamModel& model, const Eigen::MatrixXd& data,
                       const Bounds& t_bounds, double epsilon,
                       RandomStream& rng);

struct NewtonOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 100;
};

// argmax_theta theta^T mean - A(theta) by damped Newton. Throws
// NumericalFailure (with the last iterate) when it does not converge.
Eigen::VectorXd NewtonMle(const ExpFamModel& model, const Eigen::VectorXd& mean,
                          const NewtonOptions& options = {});

// argmax_theta theta^T s - n A(theta) for a (noisy) statistic total s. The
// result always lies in the model's domain.
Eigen::VectorXd SspMle(const ExpFamModel& model, const Eigen::VectorXd& stat,
                       Eigen::Index n);

Eigen::MatrixXd FisherInformation(const ExpFamModel& model,
                                  const Eigen::VectorXd& theta);

// sqrt([I(theta)^{-1}]_jj / n), natural parameterization.
double PluginStdErr(const ExpFamModel& model, const Eigen::VectorXd& theta,
                    Eigen::Index n, int j);

// Delta-method standard error of conventional parameter j.
double ConventionalStdErr(const ExpFamModel& model,
                          const Eigen::VectorXd& theta, Eigen::Index n, int j);

}  // namespace dpboot

#endif  // DPBOOT_EXPFAM_HPP_
