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

#include "dpboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dpboot/error.hpp"
#include "dpboot/expfam.hpp"
#include "dpboot/harness.hpp"
#include "oracles.hpp"

namespace dpboot {
namespace {

BootstrapResult Result(double tau_hat, std::vector<double> reps) {
  BootstrapResult r;
  r.tau_hat = tau_hat;
  r.B = reps.size();
  r.replicates = std::move(reps);
  return r;
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIo;
}

TEST(PivotalTest, WorkedExampleMatchesBruteForce) {
  const BootstrapResult r = Result(10.0, {8, 9, 10, 11, 12});
  const ConfidenceInterval ci = PivotalInterval(r, 0.4);
  const std::vector<double> pivots{-2, -1, 0, 1, 2};
  // alpha/2 = 1/5 and 1 - alpha/2 = 4/5.
  const double xi_low = oracle::CeilingOrderStatistic(pivots, 1, 5);
  const double xi_high = oracle::CeilingOrderStatistic(pivots, 4, 5);
  EXPECT_EQ(ci.lo, 10.0 - xi_low);
  EXPECT_EQ(ci.hi, 10.0 - xi_high);
  EXPECT_EQ(ci.lo, 9.0);
  EXPECT_EQ(ci.hi, 12.0);
}

TEST(PivotalTest, DegenerateAndTranslation) {
  const BootstrapResult flat = Result(3.0, std::vector<double>(50, 3.0));
  EXPECT_EQ(PivotalInterval(flat, 0.1).lo, 3.0);
  EXPECT_EQ(PivotalInterval(flat, 0.1).hi, 3.0);
  RandomStream rng(1);
  std::vector<double> reps(101);
  for (double& v : reps) v = SampleGaussian(1.0, 2.0, rng);
  const ConfidenceInterval base = PivotalInterval(Result(1.0, reps), 0.1);
  std::vector<double> shifted = reps;
  for (double& v : shifted) v += 8.0;
  const ConfidenceInterval moved = PivotalInterval(Result(9.0, shifted), 0.1);
  EXPECT_NEAR(moved.lo, base.lo + 8.0, 1e-12);
  EXPECT_NEAR(moved.hi, base.hi + 8.0, 1e-12);
}

TEST(EfronTest, WorkedExampleAndDegenerate) {
  std::vector<double> reps(100);
  std::iota(reps.begin(), reps.end(), 1.0);
  const ConfidenceInterval ci = EfronPercentileInterval(Result(50.0, reps), 0.10);
  EXPECT_EQ(ci.lo, 5.0);
  EXPECT_EQ(ci.hi, 95.0);
  const ConfidenceInterval flat =
      EfronPercentileInterval(Result(0.0, std::vector<double>(9, -2.0)), 0.3);
  EXPECT_EQ(flat.lo, -2.0);
  EXPECT_EQ(flat.hi, -2.0);
}

TEST(EfronTest, CommutesWithMonotoneMaps) {
  RandomStream rng(2);
  std::vector<double> reps(77);
  for (double& v : reps) v = SampleGaussian(0.0, 1.0, rng);
  std::vector<double> mapped = reps;
  for (double& v : mapped) v = std::exp(v);
  const ConfidenceInterval a = EfronPercentileInterval(Result(0.0, reps), 0.2);
  const ConfidenceInterval b = EfronPercentileInterval(Result(1.0, mapped), 0.2);
  EXPECT_EQ(b.lo, std::exp(a.lo));
  EXPECT_EQ(b.hi, std::exp(a.hi));
}

TEST(IntervalPropertyTest, OrderedAndEfronWithinRange) {
  RandomStream rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t b = 1 + static_cast<std::size_t>(SamplePoisson(40, rng));
    std::vector<double> reps(b);
    for (double& v : reps) v = SampleGamma(1.5, 1.0, rng);
    BootstrapResult r = Result(SampleGaussian(1.5, 1.0, rng), reps);
    r.sigma_hat = SampleGamma(2.0, 1.0, rng);
    std::vector<double> sig(b);
    for (double& v : sig) v = SampleGamma(2.0, 1.0, rng);
    r.sigma_replicates = sig;
    const double alpha = SampleUniform(0.01, 0.99, rng);
    const ConfidenceInterval e = EfronPercentileInterval(r, alpha);
    const ConfidenceInterval p = PivotalInterval(r, alpha);
    const ConfidenceInterval s = StudentizedPivotalInterval(r, alpha);
    EXPECT_LE(e.lo, e.hi);
    EXPECT_LE(p.lo, p.hi);
    EXPECT_LE(s.lo, s.hi);
    EXPECT_GE(e.lo, *std::min_element(reps.begin(), reps.end()));
    EXPECT_LE(e.hi, *std::max_element(reps.begin(), reps.end()));
  }
}

TEST(IntervalPropertyTest, PivotalEqualsEfronForSymmetricReplicates) {
  RandomStream rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const double tau = static_cast<double>(SamplePoisson(20, rng));
    const std::size_t half = 1 + static_cast<std::size_t>(SamplePoisson(30, rng));
    std::vector<double> reps;
    for (std::size_t i = 0; i < half; ++i) {
      const double d = static_cast<double>(1 + SamplePoisson(5, rng));
      reps.push_back(tau + d);
      reps.push_back(tau - d);
    }
    if (rep % 2 == 0) reps.push_back(tau);
    const double b = static_cast<double>(reps.size());
    double alpha = SampleUniform(0.02, 0.6, rng);
    if (std::abs(alpha * b / 2.0 - std::round(alpha * b / 2.0)) < 1e-6) continue;
    const BootstrapResult r = Result(tau, reps);
    const ConfidenceInterval p = PivotalInterval(r, alpha);
    const ConfidenceInterval e = EfronPercentileInterval(r, alpha);
    EXPECT_EQ(p.lo, e.lo);
    EXPECT_EQ(p.hi, e.hi);
  }
}

TEST(IntervalPropertyTest, SymmetricCaseDiffersWhenTailCountIsInteger) {
  // alpha * B / 2 = 1: the two intervals land one order statistic apart.
  const BootstrapResult r = Result(0.0, {-2, -1, 1, 2});
  const ConfidenceInterval p = PivotalInterval(r, 0.5);
  const ConfidenceInterval e = EfronPercentileInterval(r, 0.5);
  EXPECT_EQ(e.lo, -2.0);
  EXPECT_EQ(e.hi, 1.0);
  EXPECT_EQ(p.lo, -1.0);
  EXPECT_EQ(p.hi, 2.0);
}

TEST(StudentizedTest, UnitScalesReduceToPivotal) {
  RandomStream rng(5);
  std::vector<double> reps(60);
  for (double& v : reps) v = SampleGaussian(2.0, 1.0, rng);
  BootstrapResult r = Result(2.0, reps);
  r.sigma_hat = 1.0;
  r.sigma_replicates = std::vector<double>(60, 1.0);
  const ConfidenceInterval s = StudentizedPivotalInterval(r, 0.1);
  const ConfidenceInterval p = PivotalInterval(r, 0.1);
  EXPECT_NEAR(s.lo, p.lo, 1e-15);
  EXPECT_NEAR(s.hi, p.hi, 1e-15);
}

TEST(StudentizedTest, DoublingSigmaHatDoublesHalfWidths) {
  BootstrapResult r = Result(5.0, {3.0, 4.5, 5.0, 6.0, 8.0});
  r.sigma_hat = 1.0;
  r.sigma_replicates = std::vector<double>{1.0, 0.5, 2.0, 1.0, 1.5};
  const ConfidenceInterval a = StudentizedPivotalInterval(r, 0.4);
  r.sigma_hat = 2.0;
  const ConfidenceInterval b = StudentizedPivotalInterval(r, 0.4);
  // Pivots (t - 5)/s = {-2, -1, 0, 1, 2}: xi_0.2 = 1, xi_0.8 = 2 by the
  // ceiling rule.
  EXPECT_EQ(a.lo, 5.0 - 1.0);
  EXPECT_EQ(a.hi, 5.0 + 2.0);
  EXPECT_EQ(b.lo - 5.0, 2.0 * (a.lo - 5.0));
  EXPECT_EQ(b.hi - 5.0, 2.0 * (a.hi - 5.0));
  const BootstrapResult flat = [] {
    BootstrapResult f = Result(1.0, std::vector<double>(5, 1.0));
    f.sigma_hat = 0.3;
    f.sigma_replicates = std::vector<double>(5, 0.2);
    return f;
  }();
  EXPECT_EQ(StudentizedPivotalInterval(flat, 0.2).lo, 1.0);
  EXPECT_EQ(StudentizedPivotalInterval(flat, 0.2).hi, 1.0);
}

TEST(StudentizedTest, MissingOrNonPositiveScales) {
  const BootstrapResult bare = Result(0.0, {1.0, 2.0});
  EXPECT_EQ(CodeOf([&] { StudentizedPivotalInterval(bare, 0.1); }),
            ErrorCode::kUnsupportedEstimator);
  BootstrapResult r = Result(0.0, {1.0, 2.0, 3.0, -1.0});
  r.sigma_hat = 1.0;
  r.sigma_replicates = std::vector<double>{1.0, 0.0, -2.0, 1.0};
  std::size_t excluded = 0;
  const ConfidenceInterval ci = StudentizedPivotalInterval(r, 0.5, &excluded);
  EXPECT_EQ(excluded, 2u);
  // Surviving pivots {1, -1}.
  EXPECT_EQ(ci.lo, 0.0 - 1.0);
  EXPECT_EQ(ci.hi, 0.0 + 1.0);
}

TEST(IntervalErrorTest, EmptyAndBadAlpha) {
  const BootstrapResult empty = Result(0.0, {});
  EXPECT_EQ(CodeOf([&] { PivotalInterval(empty, 0.1); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(CodeOf([&] { EfronPercentileInterval(empty, 0.1); }),
            ErrorCode::kEmptyInput);
  EXPECT_EQ(CodeOf([&] { BiasCorrect(empty); }), ErrorCode::kEmptyInput);
  const BootstrapResult one = Result(0.0, {1.0});
  EXPECT_EQ(CodeOf([&] { PivotalInterval(one, 0.0); }), ErrorCode::kInvalidParameter);
  EXPECT_EQ(CodeOf([&] { EfronPercentileInterval(one, 1.0); }),
            ErrorCode::kInvalidParameter);
}

TEST(BiasTest, Examples) {
  const BiasCorrection none = BiasCorrect(Result(4.0, {3.0, 5.0, 4.0}));
  EXPECT_EQ(none.bias, 0.0);
  EXPECT_EQ(none.tau_bc, 4.0);
  const BiasCorrection shifted = BiasCorrect(Result(10.0, {11.0, 13.0, 12.0}));
  EXPECT_EQ(shifted.bias, 2.0);
  EXPECT_EQ(shifted.tau_bc, 8.0);
}

// Mean of the data; resampling hands back the data it was constructed with.
class EchoEstimator final : public PrivateEstimator {
 public:
  explicit EchoEstimator(Eigen::MatrixXd data) : data_(std::move(data)) {}
  Estimate Fit(const Eigen::MatrixXd& data, RandomStream&) const override {
    Estimate e;
    e.theta = Eigen::VectorXd::Constant(1, data.mean());
    e.tau = e.theta;
    return e;
  }
  Eigen::MatrixXd Resample(const Estimate&, Eigen::Index,
                           RandomStream&) const override {
    return data_;
  }

 private:
  Eigen::MatrixXd data_;
};

TEST(EngineTest, DeterministicPipelineReproducesPoint) {
  Eigen::MatrixXd data(3, 1);
  data << 1.0, 2.0, 6.0;
  const EchoEstimator est(data);
  RandomStream rng(6);
  const BootstrapRun run = RunParametricBootstrap(est, data, 1, rng);
  ASSERT_EQ(run.replicates.size(), 1u);
  EXPECT_EQ(run.replicates[0].tau[0], run.point.tau[0]);
  EXPECT_EQ(run.point.tau[0], 3.0);
}

TEST(EngineTest, RejectsZeroReplicates) {
  const EchoEstimator est(Eigen::MatrixXd::Ones(2, 1));
  RandomStream rng(7);
  EXPECT_EQ(CodeOf([&] { RunParametricBootstrap(est, Eigen::MatrixXd::Ones(2, 1), 0, rng); }),
            ErrorCode::kInvalidParameter);
}

SspMleEstimator BernoulliEstimator() {
  ModelBounds b{Bounds({{0.0, 1.0}}), Bounds({{0.0, 1.0}})};
  return SspMleEstimator(MakeBernoulli(), b, 0.5);
}

TEST(EngineTest, ReproducibleAcrossRunsAndThreadCounts) {
  const SspMleEstimator est = BernoulliEstimator();
  RandomStream data_rng(8);
  const Eigen::MatrixXd data =
      MakeBernoulli()->Sample(Eigen::VectorXd::Zero(1), 100, data_rng);
  auto run = [&](int threads) {
    RandomStream rng(99);
    BootstrapOptions opts;
    opts.threads = threads;
    return Marginal(RunParametricBootstrap(est, data, 200, rng, opts), 0);
  };
  const BootstrapResult a = run(1);
  const BootstrapResult b = run(1);
  const BootstrapResult c = run(4);
  EXPECT_EQ(a.replicates.size(), 200u);
  EXPECT_EQ(a.replicates, b.replicates);
  EXPECT_EQ(a.replicates, c.replicates);
  EXPECT_EQ(a.tau_hat, c.tau_hat);
  EXPECT_EQ(*a.sigma_replicates, *c.sigma_replicates);
}

TEST(EngineTest, ReplicateFailuresAreCountedAndRedrawn) {
  Estimate point;
  point.tau = point.theta = Eigen::VectorXd::Zero(1);
  // Fails on every first attempt, succeeds on any redraw.
  const ReplicateGenerator flaky = [](RandomStream& s) {
    if (s.path().size() == 1) Fail(ErrorCode::kReplicateFailure, "first attempt");
    Estimate e;
    e.tau = e.theta = Eigen::VectorXd::Constant(1, static_cast<double>(s.path()[0]));
    return e;
  };
  RandomStream rng(9);
  const BootstrapRun none = RunReplicateBootstrap(point, flaky, 20, rng);
  EXPECT_EQ(none.failures, 20u);
  EXPECT_TRUE(none.replicates.empty());
  BootstrapOptions opts;
  opts.max_redraws = 10;
  const BootstrapRun redrawn = RunReplicateBootstrap(point, flaky, 20, rng, opts);
  EXPECT_EQ(redrawn.failures, 0u);
  ASSERT_EQ(redrawn.replicates.size(), 20u);
  EXPECT_EQ(redrawn.replicates[7].tau[0], 7.0);
  const BootstrapResult m = Marginal(redrawn, 0);
  EXPECT_EQ(m.B, 20u);
  EXPECT_EQ(m.replicates.size(), m.B - m.failures);
}

TEST(EngineTest, ReplicatesTrackTheSamplingDistribution) {
  // Replicates generated at theta = log 2.3 against an outer Monte Carlo of
  // the estimator at the same parameter.
  const ModelPtr m = MakePoisson();
  const ModelBounds bounds{Bounds({{0.0, 9.0}}), Bounds({{0.0, 9.0}})};
  const SspMleEstimator est(m, bounds, 0.5);
  Estimate truth;
  truth.theta = m->ToNatural(Eigen::VectorXd::Constant(1, 2.3));
  truth.tau = Eigen::VectorXd::Constant(1, 2.3);
  const Eigen::Index n = 100;
  const ReplicateGenerator gen = [&](RandomStream& s) {
    return est.Fit(est.Resample(truth, n, s), s);
  };
  RandomStream boot_rng(10);
  const BootstrapResult reps =
      Marginal(RunReplicateBootstrap(truth, gen, 5000, boot_rng), 0);
  std::vector<double> outer;
  const RandomStream outer_root(11);
  for (std::uint64_t t = 0; t < 5000; ++t) {
    RandomStream s = outer_root.Child(t);
    const Eigen::MatrixXd data = m->Sample(truth.theta, n, s);
    outer.push_back(est.Fit(data, s).tau[0]);
  }
  const double se = std::sqrt(oracle::Variance(outer) * 2.0 / 5000.0);
  EXPECT_NEAR(oracle::Mean(reps.replicates), oracle::Mean(outer), 3.0 * se);
}

TEST(EngineTest, NoiselessGaussianEfronCoverage) {
  const ModelPtr m = MakeGaussianKnownVariance(1.0);
  const ModelBounds bounds{Bounds({{-1e6, 1e6}}), Bounds({{-1e6, 1e6}})};
  const SspMleEstimator est(m, bounds, kNoiseless);
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(1);
  const RandomStream root(12);
  int covered = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    RandomStream s = root.Child(static_cast<std::uint64_t>(t));
    RandomStream data_rng = s.Child(0);
    const Eigen::MatrixXd data = m->Sample(theta, 100, data_rng);
    RandomStream boot = s.Child(1);
    const BootstrapResult r = Marginal(RunParametricBootstrap(est, data, 1000, boot), 0);
    if (EfronPercentileInterval(r, 0.05).Contains(0.0)) ++covered;
  }
  const double coverage = static_cast<double>(covered) / trials;
  EXPECT_GE(coverage, 0.935);
  EXPECT_LE(coverage, 0.965);
}

TEST(EngineTest, BiasCorrectionReducesClampingBias) {
  // Poisson(10) clamped at its 75th percentile: the clamped mean is biased
  // low and the bootstrap estimate of that bias should pull it back.
  const double lambda = 10.0;
  const double threshold = static_cast<double>(oracle::PoissonQuantile(0.75, lambda));
  ASSERT_EQ(threshold, 12.0);
  const ModelPtr m = MakePoisson();
  const ModelBounds bounds{Bounds({{0.0, threshold}}), Bounds({{0.0, threshold}})};
  const SspMleEstimator est(m, bounds, 1.0);
  const Eigen::VectorXd theta = m->ToNatural(Eigen::VectorXd::Constant(1, lambda));
  const RandomStream root(13);
  int improved = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    RandomStream s = root.Child(static_cast<std::uint64_t>(t));
    RandomStream data_rng = s.Child(0);
    const Eigen::MatrixXd data = m->Sample(theta, 500, data_rng);
    RandomStream boot = s.Child(1);
    const BootstrapResult r = Marginal(RunParametricBootstrap(est, data, 200, boot), 0);
    const BiasCorrection bc = BiasCorrect(r);
    if (std::abs(bc.tau_bc - lambda) < std::abs(r.tau_hat - lambda)) ++improved;
  }
  EXPECT_GE(improved, 80);
}

}  // namespace
}  // namespace dpboot
