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

#include "dpboot/error.hpp"
#include "dpboot/parallel.hpp"

namespace dpboot {
namespace {

void ValidateAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "alpha must lie in (0, 1)");
  }
}

std::vector<double> Sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values;
}

template <typename Attempt>
BootstrapRun Collect(std::size_t B, RandomStream& rng,
                     const BootstrapOptions& options, Attempt&& attempt) {
  if (B < 1) Fail(ErrorCode::kInvalidParameter, "B must be >= 1");
  std::vector<std::optional<Estimate>> slots(B);
  ParallelFor(B, options.threads, [&](std::size_t b) {
    for (int a = 0; a <= options.max_redraws; ++a) {
      RandomStream stream =
          a == 0 ? rng.Child(b)
                 : rng.Child({static_cast<std::uint64_t>(b),
                              static_cast<std::uint64_t>(a)});
      try {
        slots[b] = attempt(stream);
        return;
      } catch (const Error&) {
      }
    }
  });
  BootstrapRun run;
  run.B = B;
  run.replicates.reserve(B);
  for (auto& slot : slots) {
    if (slot) {
      run.replicates.push_back(std::move(*slot));
    } else {
      ++run.failures;
    }
  }
  return run;
}

}  // namespace

BootstrapRun RunParametricBootstrap(const PrivateEstimator& estimator,
                                    const Eigen::MatrixXd& data, std::size_t B,
                                    RandomStream& rng,
                                    const BootstrapOptions& options) {
  if (B < 1) Fail(ErrorCode::kInvalidParameter, "B must be >= 1");
  const Estimate point = estimator.Fit(data, rng);
  const Eigen::Index n = data.rows();
  BootstrapRun run = Collect(B, rng, options, [&](RandomStream& stream) {
    return estimator.Fit(estimator.Resample(point, n, stream), stream);
  });
  run.point = point;
  return run;
}

BootstrapRun RunReplicateBootstrap(const Estimate& point,
                                   const ReplicateGenerator& generate,
                                   std::size_t B, RandomStream& rng,
                                   const BootstrapOptions& options) {
  BootstrapRun run = Collect(
      B, rng, options, [&](RandomStream& stream) { return generate(stream); });
  run.point = point;
  return run;
}

BootstrapResult Marginal(const BootstrapRun& run, Eigen::Index coordinate) {
  if (coordinate < 0 || coordinate >= run.point.tau.size()) {
    Fail(ErrorCode::kInvalidParameter, "target coordinate out of range");
  }
  BootstrapResult result;
  result.tau_hat = run.point.tau[coordinate];
  if (run.point.sigma) result.sigma_hat = (*run.point.sigma)[coordinate];
  result.B = run.B;
  result.failures = run.failures;
  result.replicates.reserve(run.replicates.size());
  bool all_sigma = true;
  for (const Estimate& r : run.replicates) {
    result.replicates.push_back(r.tau[coordinate]);
    all_sigma = all_sigma && r.sigma.has_value();
  }
  if (all_sigma && result.sigma_hat) {
    std::vector<double> sigmas;
    sigmas.reserve(run.replicates.size());
    for (const Estimate& r : run.replicates) sigmas.push_back((*r.sigma)[coordinate]);
    result.sigma_replicates = std::move(sigmas);
  }
  return result;
}

ConfidenceInterval PivotalInterval(const BootstrapResult& result, double alpha) {
  ValidateAlpha(alpha);
  if (result.replicates.empty()) {
    Fail(ErrorCode::kEmptyInput, "no bootstrap replicates");
  }
  std::vector<double> pivots;
  pivots.reserve(result.replicates.size());
  for (double r : result.replicates) pivots.push_back(r - result.tau_hat);
  const std::vector<double> sorted = Sorted(std::move(pivots));
  return {result.tau_hat - SortedQuantile(sorted, alpha / 2.0),
          result.tau_hat - SortedQuantile(sorted, 1.0 - alpha / 2.0)};
}

ConfidenceInterval StudentizedPivotalInterval(const BootstrapResult& result,
                                              double alpha,
                                              std::size_t* excluded) {
  ValidateAlpha(alpha);
  if (!result.sigma_hat || !result.sigma_replicates) {
    Fail(ErrorCode::kUnsupportedEstimator,
         "studentized interval needs standard errors from the estimator");
  }
  const std::vector<double>& sigmas = *result.sigma_replicates;
  std::vector<double> pivots;
  pivots.reserve(result.replicates.size());
  std::size_t skipped = 0;
  for (std::size_t b = 0; b < result.replicates.size(); ++b) {
    if (!(sigmas[b] > 0.0)) {
      ++skipped;
      continue;
    }
    pivots.push_back((result.replicates[b] - result.tau_hat) / sigmas[b]);
  }
  if (excluded) *excluded = skipped;
  if (pivots.empty()) {
    Fail(ErrorCode::kEmptyInput, "no replicate with a positive standard error");
  }
  const std::vector<double> sorted = Sorted(std::move(pivots));
  const double s = *result.sigma_hat;
  return {result.tau_hat - SortedQuantile(sorted, alpha / 2.0) * s,
          result.tau_hat - SortedQuantile(sorted, 1.0 - alpha / 2.0) * s};
}

ConfidenceInterval EfronPercentileInterval(const BootstrapResult& result,
                                           double alpha) {
  ValidateAlpha(alpha);
  if (result.replicates.empty()) {
    Fail(ErrorCode::kEmptyInput, "no bootstrap replicates");
  }
  const std::vector<double> sorted = Sorted(result.replicates);
  return {SortedQuantile(sorted, 1.0 - alpha / 2.0),
          SortedQuantile(sorted, alpha / 2.0)};
}

BiasCorrection BiasCorrect(const BootstrapResult& result) {
  if (result.replicates.empty()) {
    Fail(ErrorCode::kEmptyInput, "no bootstrap replicates");
  }
  const double mean =
      std::accumulate(result.replicates.begin(), result.replicates.end(), 0.0) /
      static_cast<double>(result.replicates.size());
  BiasCorrection out;
  out.bias = mean - result.tau_hat;
  out.tau_bc = result.tau_hat - out.bias;
  return out;
}

}  // namespace dpboot
