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

#include "dpboot/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dpboot/error.hpp"

namespace dpboot {
namespace {

Eigen::VectorXd Scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

void RequireDim(const Eigen::VectorXd& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    Fail(ErrorCode::kShape, std::string(what) + " has the wrong dimension");
  }
}

class Bernoulli final : public ExpFamModel {
 public:
  std::string_view name() const override { return "bernoulli"; }
  int dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"p"}; }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    t[0] = x[0];
  }
  bool IdentityStatistic() const override { return true; }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == 1 && std::isfinite(theta[0]);
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    const double t = theta[0];
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    return Scalar(Logistic(theta[0]));
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd& theta) const override {
    const double p = Logistic(theta[0]);
    return Eigen::MatrixXd::Constant(1, 1, p * (1.0 - p));
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    return Scalar(std::clamp(mean[0], kFeasibleMargin, 1.0 - kFeasibleMargin));
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    return Scalar(std::log(mean[0] / (1.0 - mean[0])));
  }
  Eigen::VectorXd InitialTheta() const override { return Scalar(0.0); }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    const double p = Logistic(theta[0]);
    Eigen::MatrixXd out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, 0) = rng.NextOpenUnit() < p ? 1.0 : 0.0;
    }
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, 1, "bernoulli parameters");
    const double p = params[0];
    if (!(p > 0.0 && p < 1.0)) {
      Fail(ErrorCode::kInvalidParameter, "bernoulli p must lie in (0, 1)");
    }
    return Scalar(std::log(p / (1.0 - p)));
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    return Scalar(Logistic(theta[0]));
  }
  Eigen::MatrixXd ConventionalJacobian(
      const Eigen::VectorXd& theta) const override {
    return Hessian(theta);
  }

 private:
  static double Logistic(double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
  }
};

class Poisson final : public ExpFamModel {
 public:
  std::string_view name() const override { return "poisson"; }
  int dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"lambda"}; }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    t[0] = x[0];
  }
  bool IdentityStatistic() const override { return true; }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == 1 && std::isfinite(theta[0]) && theta[0] < 700.0;
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    return std::exp(theta[0]);
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    return Scalar(std::exp(theta[0]));
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd& theta) const override {
    return Eigen::MatrixXd::Constant(1, 1, std::exp(theta[0]));
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    return Scalar(std::max(mean[0], kFeasibleMargin));
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    return Scalar(std::log(mean[0]));
  }
  Eigen::VectorXd InitialTheta() const override { return Scalar(0.0); }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    std::poisson_distribution<long long> dist(std::exp(theta[0]));
    Eigen::MatrixXd out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, 0) = static_cast<double>(dist(rng.engine()));
    }
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, 1, "poisson parameters");
    if (!(params[0] > 0.0)) {
      Fail(ErrorCode::kInvalidParameter, "poisson rate must be positive");
    }
    return Scalar(std::log(params[0]));
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    return Scalar(std::exp(theta[0]));
  }
  Eigen::MatrixXd ConventionalJacobian(
      const Eigen::VectorXd& theta) const override {
    return Hessian(theta);
  }
};

// N(mu, sigma0^2) with sigma0 known: T(x) = x, theta = mu / sigma0^2,
// A(theta) = sigma0^2 theta^2 / 2.
class GaussianKnownVariance final : public ExpFamModel {
 public:
  explicit GaussianKnownVariance(double sigma) : var_(sigma * sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      Fail(ErrorCode::kInvalidParameter, "known sigma must be positive");
    }
  }

  std::string_view name() const override { return "gaussian-known-variance"; }
  int dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"mu"}; }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    t[0] = x[0];
  }
  bool IdentityStatistic() const override { return true; }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == 1 && std::isfinite(theta[0]);
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    return 0.5 * var_ * theta[0] * theta[0];
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    return Scalar(var_ * theta[0]);
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Constant(1, 1, var_);
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    return mean;
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    return Scalar(mean[0] / var_);
  }
  Eigen::VectorXd InitialTheta() const override { return Scalar(0.0); }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    std::normal_distribution<double> dist(var_ * theta[0], std::sqrt(var_));
    Eigen::MatrixXd out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = dist(rng.engine());
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, 1, "gaussian mean");
    return Scalar(params[0] / var_);
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    return Scalar(var_ * theta[0]);
  }
  Eigen::MatrixXd ConventionalJacobian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Constant(1, 1, var_);
  }

 private:
  double var_;
};

// N(mu, sigma^2) with both unknown: T(x) = (x, x^2),
// theta = (mu / sigma^2, -1 / (2 sigma^2)).
class Gaussian final : public ExpFamModel {
 public:
  std::string_view name() const override { return "gaussian"; }
  int dim() const override { return 2; }
  std::vector<std::string> param_names() const override {
    return {"mu", "sigma2"};
  }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    t[0] = x[0];
    t[1] = x[0] * x[0];
  }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == 2 && theta.allFinite() && theta[1] < 0.0;
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    const double t1 = theta[0], t2 = theta[1];
    return -t1 * t1 / (4.0 * t2) - 0.5 * std::log(-2.0 * t2);
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    const auto [mu, s2] = Moments(theta);
    Eigen::VectorXd m(2);
    m << mu, mu * mu + s2;
    return m;
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd& theta) const override {
    const auto [mu, s2] = Moments(theta);
    Eigen::MatrixXd h(2, 2);
    h << s2, 2.0 * mu * s2, 2.0 * mu * s2, 4.0 * mu * mu * s2 + 2.0 * s2 * s2;
    return h;
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    // Raise the second moment until the implied variance is at least the
    // margin; the first moment is unconstrained.
    Eigen::VectorXd m = mean;
    m[1] = std::max(m[1], m[0] * m[0] + kFeasibleMargin);
    return m;
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    const double mu = mean[0];
    const double s2 = mean[1] - mean[0] * mean[0];
    Eigen::VectorXd theta(2);
    theta << mu / s2, -0.5 / s2;
    return theta;
  }
  Eigen::VectorXd InitialTheta() const override {
    Eigen::VectorXd theta(2);
    theta << 0.0, -0.5;
    return theta;
  }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    const auto [mu, s2] = Moments(theta);
    std::normal_distribution<double> dist(mu, std::sqrt(s2));
    Eigen::MatrixXd out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = dist(rng.engine());
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, 2, "gaussian (mu, sigma2)");
    if (!(params[1] > 0.0)) {
      Fail(ErrorCode::kInvalidParameter, "gaussian variance must be positive");
    }
    Eigen::VectorXd theta(2);
    theta << params[0] / params[1], -0.5 / params[1];
    return theta;
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    const auto [mu, s2] = Moments(theta);
    Eigen::VectorXd p(2);
    p << mu, s2;
    return p;
  }
  Eigen::MatrixXd ConventionalJacobian(
      const Eigen::VectorXd& theta) const override {
    const auto [mu, s2] = Moments(theta);
    Eigen::MatrixXd j(2, 2);
    j << s2, 2.0 * mu * s2, 0.0, 2.0 * s2 * s2;
    return j;
  }

 private:
  static std::pair<double, double> Moments(const Eigen::VectorXd& theta) {
    const double s2 = -0.5 / theta[1];
    return {theta[0] * s2, s2};
  }
};

// Gamma(shape k known, scale s): T(x) = x, theta = -1/s,
// A(theta) = -k log(-theta).
class GammaScale final : public ExpFamModel {
 public:
  explicit GammaScale(double shape) : shape_(shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
      Fail(ErrorCode::kInvalidParameter, "gamma shape must be positive");
    }
  }

  std::string_view name() const override { return "gamma-scale"; }
  int dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"scale"}; }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    t[0] = x[0];
  }
  bool IdentityStatistic() const override { return true; }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == 1 && std::isfinite(theta[0]) && theta[0] < 0.0;
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    return -shape_ * std::log(-theta[0]);
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    return Scalar(-shape_ / theta[0]);
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd& theta) const override {
    return Eigen::MatrixXd::Constant(1, 1, shape_ / (theta[0] * theta[0]));
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    return Scalar(std::max(mean[0], kFeasibleMargin));
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    return Scalar(-shape_ / mean[0]);
  }
  Eigen::VectorXd InitialTheta() const override { return Scalar(-1.0); }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    std::gamma_distribution<double> dist(shape_, -1.0 / theta[0]);
    Eigen::MatrixXd out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = dist(rng.engine());
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, 1, "gamma scale");
    if (!(params[0] > 0.0)) {
      Fail(ErrorCode::kInvalidParameter, "gamma scale must be positive");
    }
    return Scalar(-1.0 / params[0]);
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    return Scalar(-1.0 / theta[0]);
  }
  Eigen::MatrixXd ConventionalJacobian(
      const Eigen::VectorXd& theta) const override {
    return Eigen::MatrixXd::Constant(1, 1, 1.0 / (theta[0] * theta[0]));
  }

 private:
  double shape_;
};

// d independent Gaussian means with known variances v_j: T(x) = x,
// theta_j = mu_j / v_j.
class MultivariateGaussianMean final : public ExpFamModel {
 public:
  explicit MultivariateGaussianMean(std::vector<double> variances)
      : var_(Eigen::Map<const Eigen::VectorXd>(
            variances.data(), static_cast<Eigen::Index>(variances.size()))) {
    if (var_.size() == 0) {
      Fail(ErrorCode::kInvalidParameter, "mvn-mean needs at least one dimension");
    }
    for (Eigen::Index j = 0; j < var_.size(); ++j) {
      if (!(var_[j] > 0.0) || !std::isfinite(var_[j])) {
        Fail(ErrorCode::kInvalidParameter, "mvn-mean variances must be positive");
      }
    }
  }

  std::string_view name() const override { return "mvn-mean"; }
  int dim() const override { return static_cast<int>(var_.size()); }
  int data_dim() const override { return dim(); }
  std::vector<std::string> param_names() const override {
    std::vector<std::string> names;
    for (int j = 0; j < dim(); ++j) names.push_back("mu" + std::to_string(j));
    return names;
  }

  void SufficientStatistic(std::span<const double> x,
                           std::span<double> t) const override {
    std::copy(x.begin(), x.end(), t.begin());
  }
  bool IdentityStatistic() const override { return true; }
  bool InDomain(const Eigen::VectorXd& theta) const override {
    return theta.size() == var_.size() && theta.allFinite();
  }
  double LogPartition(const Eigen::VectorXd& theta) const override {
    return 0.5 * (var_.array() * theta.array().square()).sum();
  }
  Eigen::VectorXd MeanMap(const Eigen::VectorXd& theta) const override {
    return var_.cwiseProduct(theta);
  }
  Eigen::MatrixXd Hessian(const Eigen::VectorXd&) const override {
    return var_.asDiagonal();
  }
  Eigen::VectorXd ProjectMean(const Eigen::VectorXd& mean) const override {
    return mean;
  }
  std::optional<Eigen::VectorXd> ClosedFormMle(
      const Eigen::VectorXd& mean) const override {
    return mean.cwiseQuotient(var_);
  }
  Eigen::VectorXd InitialTheta() const override {
    return Eigen::VectorXd::Zero(var_.size());
  }

  Eigen::MatrixXd Sample(const Eigen::VectorXd& theta, Eigen::Index n,
                         RandomStream& rng) const override {
    std::normal_distribution<double> std_normal(0.0, 1.0);
    const Eigen::VectorXd mu = MeanMap(theta);
    const Eigen::VectorXd sd = var_.cwiseSqrt();
    Eigen::MatrixXd out(n, var_.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < var_.size(); ++j) {
        out(i, j) = mu[j] + sd[j] * std_normal(rng.engine());
      }
    }
    return out;
  }

  Eigen::VectorXd ToNatural(const Eigen::VectorXd& params) const override {
    RequireDim(params, var_.size(), "mvn-mean parameters");
    return params.cwiseQuotient(var_);
  }
  Eigen::VectorXd FromNatural(const Eigen::VectorXd& theta) const override {
    return MeanMap(theta);
  }
  Eigen::MatrixXd ConventionalJacobian(const Eigen::VectorXd&) const override {
    return var_.asDiagonal();
  }

 private:
  Eigen::VectorXd var_;
};

double Objective(const ExpFamModel& model, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& mean) {
  return theta.dot(mean) - model.LogPartition(theta);
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ModelPtr MakeBernoulli() { return std::make_shared<Bernoulli>(); }
ModelPtr MakePoisson() { return std::make_shared<Poisson>(); }
ModelPtr MakeGaussianKnownVariance(double sigma) {
  return std::make_shared<GaussianKnownVariance>(sigma);
}
ModelPtr MakeGaussian() { return std::make_shared<Gaussian>(); }
ModelPtr MakeGammaScale(double shape) {
  return std::make_shared<GammaScale>(shape);
}
ModelPtr MakeMultivariateGaussianMean(std::vector<double> variances) {
  return std::make_shared<MultivariateGaussianMean>(std::move(variances));
}

std::vector<std::string> CatalogNames() {
  return {"bernoulli", "poisson",     "gaussian-known-variance",
          "gaussian",  "gamma-scale", "mvn-mean"};
}

ModelPtr MakeModel(std::string_view name, std::span<const double> fixed) {
  auto expect = [&](std::size_t count) {
    if (fixed.size() != count) {
      Fail(ErrorCode::kInvalidParameter,
           "model '" + std::string(name) + "' takes " + std::to_string(count) +
               " fixed parameter(s), got " + std::to_string(fixed.size()));
    }
  };
  if (name == "bernoulli") {
    expect(0);
    return MakeBernoulli();
  }
  if (name == "poisson") {
    expect(0);
    return MakePoisson();
  }
  if (name == "gaussian-known-variance") {
    expect(1);
    return MakeGaussianKnownVariance(fixed[0]);
  }
  if (name == "gaussian") {
    expect(0);
    return MakeGaussian();
  }
  if (name == "gamma-scale") {
    expect(1);
    return MakeGammaScale(fixed[0]);
  }
  if (name == "mvn-mean") {
    return MakeMultivariateGaussianMean(
        std::vector<double>(fixed.begin(), fixed.end()));
  }
  Fail(ErrorCode::kInvalidParameter,
       "unknown model '" + std::string(name) + "'");
}

Eigen::VectorXd SufficientStatisticTotal(const ExpFamModel& model,
                                         const Eigen::MatrixXd& data,
                                         const Bounds* t_bounds) {
  if (data.cols() != model.data_dim()) {
    Fail(ErrorCode::kShape, "data columns do not match the model");
  }
  const int dim = model.dim();
  if (t_bounds != nullptr && t_bounds->dim() != static_cast<std::size_t>(dim)) {
    Fail(ErrorCode::kInvalidBounds, "need one bound per sufficient statistic");
  }
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  if (model.IdentityStatistic()) {
    for (int j = 0; j < dim; ++j) {
      if (t_bounds) {
        const Interval& iv = (*t_bounds)[static_cast<std::size_t>(j)];
        total[j] = data.col(j).cwiseMax(iv.lower).cwiseMin(iv.upper).sum();
      } else {
        total[j] = data.col(j).sum();
      }
    }
    return total;
  }
  std::vector<double> x(static_cast<std::size_t>(data.cols()));
  std::vector<double> t(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      x[static_cast<std::size_t>(c)] = data(i, c);
    }
    model.SufficientStatistic(x, t);
    for (int j = 0; j < dim; ++j) {
      const double v = t[static_cast<std::size_t>(j)];
      total[j] += t_bounds ? (*t_bounds)[static_cast<std::size_t>(j)].Clamp(v) : v;
    }
  }
  return total;
}

NoisyVector SspRelease(const ExpFamModel& model, const Eigen::MatrixXd& data,
                       const Bounds& t_bounds, double epsilon,
                       RandomStream& rng) {
  if (t_bounds.dim() != static_cast<std::size_t>(model.dim())) {
    Fail(ErrorCode::kInvalidBounds,
         "bounds must be supplied for every sufficient statistic");
  }
  const Eigen::VectorXd total =
      SufficientStatisticTotal(model, data, &t_bounds);
  const std::vector<double> widths = t_bounds.Widths();
  return LaplaceMechanism(total, AdditiveSensitivity(widths), epsilon, rng);
}

Eigen::VectorXd NewtonMle(const ExpFamModel& model, const Eigen::VectorXd& mean,
                          const NewtonOptions& options) {
  Eigen::VectorXd theta = model.InitialTheta();
  const double tol = options.gradient_tolerance * std::max(1.0, mean.norm());
  double value = Objective(model, theta, mean);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd grad = mean - model.MeanMap(theta);
    if (grad.norm() <= tol) return theta;
    const Eigen::VectorXd step = model.Hessian(theta).ldlt().solve(grad);
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = theta + t * step;
      if (!model.InDomain(candidate)) continue;
      const double candidate_value = Objective(model, candidate, mean);
      if (std::isfinite(candidate_value) && candidate_value >= value) {
        theta = candidate;
        value = candidate_value;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // No ascent left at machine precision; accept if the gradient is small
      // relative to the curvature.
      if (grad.norm() <= 1e3 * tol) return theta;
      throw NumericalFailure("Newton line search stalled", ToStd(theta));
    }
  }
  const Eigen::VectorXd grad = mean - model.MeanMap(theta);
  if (grad.norm() <= tol) return theta;
  throw NumericalFailure("Newton did not converge within " +
                             std::to_string(options.max_iterations) +
                             " iterations",
                         ToStd(theta));
}

Eigen::VectorXd SspMle(const ExpFamModel& model, const Eigen::VectorXd& stat,
                       Eigen::Index n) {
  if (n < 1) Fail(ErrorCode::kInvalidParameter, "SSP-MLE needs n >= 1");
  RequireDim(stat, model.dim(), "statistic");
  if (!stat.allFinite()) {
    Fail(ErrorCode::kInvalidParameter, "statistic must be finite");
  }
  const Eigen::VectorXd mean =
      model.ProjectMean(stat / static_cast<double>(n));
  if (auto closed = model.ClosedFormMle(mean)) return *closed;
  return NewtonMle(model, mean);
}

Eigen::MatrixXd FisherInformation(const ExpFamModel& model,
                                  const Eigen::VectorXd& theta) {
  if (!model.InDomain(theta)) {
    Fail(ErrorCode::kInvalidParameter, "theta outside the parameter domain");
  }
  return model.Hessian(theta);
}

namespace {

Eigen::MatrixXd InverseInformation(const ExpFamModel& model,
                                   const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd info = FisherInformation(model, theta);
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("Fisher information is not positive definite",
                           ToStd(theta));
  }
  return llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
}

}  // namespace

double PluginStdErr(const ExpFamModel& model, const Eigen::VectorXd& theta,
                    Eigen::Index n, int j) {
  if (j < 0 || j >= model.dim()) {
    Fail(ErrorCode::kInvalidParameter, "coordinate out of range");
  }
  if (n < 1) Fail(ErrorCode::kInvalidParameter, "n must be >= 1");
  const Eigen::MatrixXd inv = InverseInformation(model, theta);
  return std::sqrt(inv(j, j) / static_cast<double>(n));
}

double ConventionalStdErr(const ExpFamModel& model,
                          const Eigen::VectorXd& theta, Eigen::Index n, int j) {
  if (j < 0 || j >= model.dim()) {
    Fail(ErrorCode::kInvalidParameter, "coordinate out of range");
  }
  if (n < 1) Fail(ErrorCode::kInvalidParameter, "n must be >= 1");
  const Eigen::MatrixXd jac = model.ConventionalJacobian(theta);
  const Eigen::MatrixXd cov =
      jac * InverseInformation(model, theta) * jac.transpose();
  return std::sqrt(cov(j, j) / static_cast<double>(n));
}

}  // namespace dpboot
