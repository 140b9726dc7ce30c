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

// Private linear regression by sufficient statistic perturbation (SSP-OLS)
// and the hybrid bootstrap, which simulates the privacy noise exactly and the
// covariate/error interaction term from its normal limit, so the covariates
// are never touched after the release.

#ifndef DPBOOT_OLS_HPP_
#define DPBOOT_OLS_HPP_

#include <cstddef>

#include <Eigen/Dense>

#include "dpboot/bootstrap.hpp"
#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"

namespace dpboot {

inline constexpr char kGramBudget[] = "gram";
inline constexpr char kXtyBudget[] = "xty";
inline constexpr char kSigma2Budget[] = "sigma2";

// Condition number above which a noisy Gram matrix is treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

struct RegressionData {
  Eigen::MatrixXd x;  // n x p, rows x_i^T
  Eigen::VectorXd y;
};

struct RegressionBounds {
  Bounds x;               // one interval per covariate
  Interval y;
  double residual_bound;  // residuals are clamped to [-R, R] before squaring
};

struct RegressionRelease {
  Eigen::MatrixXd noisy_gram;  // X^T X + V, exactly symmetric
  Eigen::VectorXd noisy_xty;   // X^T y + w
  Eigen::VectorXd beta_hat;
  double sigma2_hat = 0.0;
  Eigen::Index n = 0;
  PrivacyBudget budget;
  double gram_sensitivity = 0.0;
  double xty_sensitivity = 0.0;
  double residual_bound = 0.0;
  double y_width = 0.0;

  Eigen::Index p() const { return beta_hat.size(); }
  double gram_scale() const;
  double xty_scale() const;
  // Q_hat = (X^T X + V) / n.
  Eigen::MatrixXd q_hat() const { return noisy_gram / static_cast<double>(n); }
};

// Delta_V = sum_{j <= k} width(x_j) width(x_k).
double GramSensitivity(const Bounds& x_bounds);
// Delta_w = sum_j width(x_j) width(y).
double XtySensitivity(const Bounds& x_bounds, const Interval& y_bounds);

// Budget with components "gram", "xty", "sigma2" each epsilon / 3.
PrivacyBudget DefaultRegressionBudget(double epsilon);

// Rows must already respect the bounds (filter or clamp first).
RegressionRelease SspOlsRelease(const RegressionData& data,
                                const RegressionBounds& bounds,
                                const PrivacyBudget& budget, RandomStream& rng);

// solve(noisy_gram, noisy_xty); throws kSingularRelease when ill-conditioned.
Eigen::VectorXd OlsPointEstimate(const RegressionRelease& release);

// Q_hat with eigenvalues floored at 1e-8 * trace(Q_hat) / p.
Eigen::MatrixXd ConditionedQHat(const RegressionRelease& release);

class HybridBootstrap {
 public:
  explicit HybridBootstrap(RegressionRelease release);

  // beta* for V* ~ P_V, w* ~ P_w, Z* ~ N(0, sigma2_hat Q_hat).
  Eigen::VectorXd Replicate(RandomStream& rng) const;

  // beta* = (Q + V*/n)^{-1} [Q beta_hat + Z*/sqrt(n) + w*/n] for given noise.
  Eigen::VectorXd ReplicateFromNoise(const Eigen::MatrixXd& v_star,
                                     const Eigen::VectorXd& w_star,
                                     const Eigen::VectorXd& z_star) const;

  // Z* ~ N(0, sigma2_hat * conditioned Q_hat).
  Eigen::VectorXd SampleZ(RandomStream& rng) const;

  const RegressionRelease& release() const { return release_; }

  // Adapter for RunReplicateBootstrap: tau = beta*.
  ReplicateGenerator Generator() const;

 private:
  RegressionRelease release_;
  Eigen::MatrixXd q_hat_;
  Eigen::MatrixXd z_factor_;  // lower Cholesky factor of conditioned Q_hat
};

// Symmetric p x p Laplace noise: upper triangle iid, mirrored below.
Eigen::MatrixXd SymmetricLaplaceNoise(Eigen::Index p, double scale,
                                      RandomStream& rng);

ConfidenceInterval OlsFisherCi(const RegressionRelease& release, Eigen::Index j,
                               double alpha);

// Non-private normal-equations OLS and its asymptotic CI.
Eigen::VectorXd ClassicalOls(const RegressionData& data);
ConfidenceInterval ClassicalOlsFisherCi(const RegressionData& data,
                                        Eigen::Index j, double alpha);

struct SyntheticRegressionOptions {
  double x_half_width = 5.0;
  double noise_half_width = 10.0;
  double y_bound = 150.0;
};

struct SyntheticRegression {
  RegressionData data;
  std::size_t dropped = 0;
};

// x_j ~ Unif[-5, 5], u ~ Unif[-10, 10], y = x^T beta + u; rows with |y| above
// the y bound are dropped.
SyntheticRegression GenerateSyntheticRegression(
    Eigen::Index n, const Eigen::VectorXd& beta, RandomStream& rng,
    const SyntheticRegressionOptions& options = {});

}  // namespace dpboot

#endif  // DPBOOT_OLS_HPP_
