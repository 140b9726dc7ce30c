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

#include "dpboot/ols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dpboot/error.hpp"

namespace dpboot {
namespace {

double ConditionNumber(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smallest = s[s.size() - 1];
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smallest;
}

// Solves m x = b, or throws `code` when m is too ill-conditioned.
Eigen::VectorXd GuardedSolve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                             ErrorCode code) {
  if (!m.allFinite() || !b.allFinite()) {
    Fail(code, "non-finite linear system");
  }
  if (ConditionNumber(m) > kMaxConditionNumber) {
    Fail(code, "noisy Gram matrix is singular or ill-conditioned");
  }
  return m.partialPivLu().solve(b);
}

void ValidateData(const RegressionData& data) {
  if (data.x.rows() != data.y.size()) {
    Fail(ErrorCode::kShape, "X and y have different row counts");
  }
  if (data.x.rows() <= data.x.cols()) {
    Fail(ErrorCode::kInvalidParameter, "regression needs n > p");
  }
  if (!data.x.allFinite() || !data.y.allFinite()) {
    Fail(ErrorCode::kInvalidParameter, "regression data must be finite");
  }
}

}  // namespace

double RegressionRelease::gram_scale() const {
  return LaplaceScale(gram_sensitivity, budget.epsilon(kGramBudget));
}

double RegressionRelease::xty_scale() const {
  return LaplaceScale(xty_sensitivity, budget.epsilon(kXtyBudget));
}

double GramSensitivity(const Bounds& x_bounds) {
  const std::vector<double> w = x_bounds.Widths();
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t k = j; k < w.size(); ++k) total += w[j] * w[k];
  }
  return total;
}

double XtySensitivity(const Bounds& x_bounds, const Interval& y_bounds) {
  double total = 0.0;
  for (double w : x_bounds.Widths()) total += w * y_bounds.width();
  return total;
}

PrivacyBudget DefaultRegressionBudget(double epsilon) {
  return PrivacyBudget::EqualSplit(epsilon,
                                   {kGramBudget, kXtyBudget, kSigma2Budget});
}

Eigen::MatrixXd SymmetricLaplaceNoise(Eigen::Index p, double scale,
                                      RandomStream& rng) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p, p);
  if (scale == 0.0) return v;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = j; k < p; ++k) {
      v(j, k) = SampleLaplace(0.0, scale, rng);
      v(k, j) = v(j, k);
    }
  }
  return v;
}

RegressionRelease SspOlsRelease(const RegressionData& data,
                                const RegressionBounds& bounds,
                                const PrivacyBudget& budget,
                                RandomStream& rng) {
  ValidateData(data);
  const Eigen::Index n = data.x.rows();
  const Eigen::Index p = data.x.cols();
  if (bounds.x.dim() != static_cast<std::size_t>(p)) {
    Fail(ErrorCode::kInvalidBounds, "need one bound per covariate");
  }
  if (!(bounds.residual_bound > 0.0) || !std::isfinite(bounds.residual_bound)) {
    Fail(ErrorCode::kInvalidBounds, "residual bound must be positive");
  }
  (void)Bounds({bounds.y});  // validates the response interval

  RegressionRelease release;
  release.n = n;
  release.budget = budget;
  release.gram_sensitivity = GramSensitivity(bounds.x);
  release.xty_sensitivity = XtySensitivity(bounds.x, bounds.y);
  release.residual_bound = bounds.residual_bound;
  release.y_width = bounds.y.width();

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(data.x.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  release.noisy_gram =
      gram + SymmetricLaplaceNoise(p, release.gram_scale(), rng);

  const Eigen::VectorXd xty = data.x.transpose() * data.y;
  const NoisyVector noisy_xty = LaplaceMechanism(
      xty, release.xty_sensitivity, budget.epsilon(kXtyBudget), rng);
  release.noisy_xty = noisy_xty.values;

  release.beta_hat = GuardedSolve(release.noisy_gram, release.noisy_xty,
                                  ErrorCode::kSingularRelease);

  // The residual sum of squares is an additive statistic of width R^2 once
  // residuals are clamped to [-R, R]; noise goes on the sum.
  const double r = bounds.residual_bound;
  const Eigen::VectorXd residuals =
      (data.y - data.x * release.beta_hat).cwiseMax(-r).cwiseMin(r);
  const Eigen::VectorXd rss = Eigen::VectorXd::Constant(1, residuals.squaredNorm());
  const double noisy_rss =
      LaplaceMechanism(rss, r * r, budget.epsilon(kSigma2Budget), rng).values[0];
  const double floor = 1e-8 * release.y_width * release.y_width;
  release.sigma2_hat =
      std::max(noisy_rss / static_cast<double>(n - p), floor);
  return release;
}

Eigen::VectorXd OlsPointEstimate(const RegressionRelease& release) {
  return GuardedSolve(release.noisy_gram, release.noisy_xty,
                      ErrorCode::kSingularRelease);
}

Eigen::MatrixXd ConditionedQHat(const RegressionRelease& release) {
  const Eigen::MatrixXd q = release.q_hat();
  const Eigen::Index p = q.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  const double floor =
      1e-8 * std::max(q.trace(), 0.0) / static_cast<double>(p);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(floor);
  if (floor == 0.0) lambda = lambda.cwiseMax(1e-300);
  Eigen::MatrixXd conditioned =
      eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (conditioned + conditioned.transpose());
}

HybridBootstrap::HybridBootstrap(RegressionRelease release)
    : release_(std::move(release)), q_hat_(release_.q_hat()) {
  Eigen::LLT<Eigen::MatrixXd> llt(ConditionedQHat(release_));
  if (llt.info() != Eigen::Success) {
    Fail(ErrorCode::kNumericalFailure, "conditioned Q_hat is not positive definite");
  }
  z_factor_ = llt.matrixL();
}

Eigen::VectorXd HybridBootstrap::SampleZ(RandomStream& rng) const {
  std::normal_distribution<double> std_normal(0.0, 1.0);
  Eigen::VectorXd e(q_hat_.rows());
  for (Eigen::Index j = 0; j < e.size(); ++j) e[j] = std_normal(rng.engine());
  return std::sqrt(release_.sigma2_hat) * (z_factor_ * e);
}

Eigen::VectorXd HybridBootstrap::ReplicateFromNoise(
    const Eigen::MatrixXd& v_star, const Eigen::VectorXd& w_star,
    const Eigen::VectorXd& z_star) const {
  const double n = static_cast<double>(release_.n);
  const Eigen::MatrixXd lhs = q_hat_ + v_star / n;
  const Eigen::VectorXd rhs =
      q_hat_ * release_.beta_hat + z_star / std::sqrt(n) + w_star / n;
  return GuardedSolve(lhs, rhs, ErrorCode::kReplicateFailure);
}

Eigen::VectorXd HybridBootstrap::Replicate(RandomStream& rng) const {
  const Eigen::Index p = release_.p();
  const Eigen::MatrixXd v_star =
      SymmetricLaplaceNoise(p, release_.gram_scale(), rng);
  Eigen::VectorXd w_star = Eigen::VectorXd::Zero(p);
  const double w_scale = release_.xty_scale();
  if (w_scale > 0.0) {
    for (Eigen::Index j = 0; j < p; ++j) w_star[j] = SampleLaplace(0.0, w_scale, rng);
  }
  return ReplicateFromNoise(v_star, w_star, SampleZ(rng));
}

ReplicateGenerator HybridBootstrap::Generator() const {
  return [this](RandomStream& rng) {
    Estimate e;
    e.tau = Replicate(rng);
    e.theta = e.tau;
    return e;
  };
}

ConfidenceInterval OlsFisherCi(const RegressionRelease& release, Eigen::Index j,
                               double alpha) {
  if (j < 0 || j >= release.p()) {
    Fail(ErrorCode::kInvalidParameter, "coefficient index out of range");
  }
  const Eigen::MatrixXd q = ConditionedQHat(release);
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) {
    Fail(ErrorCode::kNumericalFailure, "Q_hat is not invertible");
  }
  const Eigen::MatrixXd q_inv =
      llt.solve(Eigen::MatrixXd::Identity(q.rows(), q.cols()));
  const double se = std::sqrt(release.sigma2_hat * q_inv(j, j) /
                              static_cast<double>(release.n));
  const double z = StdNormalQuantile(alpha / 2.0);
  return {release.beta_hat[j] - z * se, release.beta_hat[j] + z * se};
}

Eigen::VectorXd ClassicalOls(const RegressionData& data) {
  ValidateData(data);
  const Eigen::MatrixXd gram = data.x.transpose() * data.x;
  return GuardedSolve(gram, data.x.transpose() * data.y,
                      ErrorCode::kNumericalFailure);
}

ConfidenceInterval ClassicalOlsFisherCi(const RegressionData& data,
                                        Eigen::Index j, double alpha) {
  const Eigen::VectorXd beta = ClassicalOls(data);
  if (j < 0 || j >= beta.size()) {
    Fail(ErrorCode::kInvalidParameter, "coefficient index out of range");
  }
  const Eigen::Index n = data.x.rows();
  const Eigen::Index p = data.x.cols();
  const double s2 =
      (data.y - data.x * beta).squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd gram = data.x.transpose() * data.x;
  const Eigen::MatrixXd inv =
      gram.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const double se = std::sqrt(s2 * inv(j, j));
  const double z = StdNormalQuantile(alpha / 2.0);
  return {beta[j] - z * se, beta[j] + z * se};
}

SyntheticRegression GenerateSyntheticRegression(
    Eigen::Index n, const Eigen::VectorXd& beta, RandomStream& rng,
    const SyntheticRegressionOptions& options) {
  const Eigen::Index p = beta.size();
  if (n <= p) Fail(ErrorCode::kInvalidParameter, "regression needs n > p");
  std::uniform_real_distribution<double> ux(-options.x_half_width,
                                            options.x_half_width);
  std::uniform_real_distribution<double> uu(-options.noise_half_width,
                                            options.noise_half_width);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = ux(rng.engine());
    y[i] = x.row(i).dot(beta) + uu(rng.engine());
  }
  SyntheticRegression out;
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(y[i]) <= options.y_bound) {
      x.row(kept) = x.row(i);
      y[kept] = y[i];
      ++kept;
    }
  }
  out.dropped = static_cast<std::size_t>(n - kept);
  out.data.x = x.topRows(kept);
  out.data.y = y.head(kept);
  return out;
}

}  // namespace dpboot
