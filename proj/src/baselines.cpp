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

#include "dpboot/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dpboot/error.hpp"
#include "dpboot/privacy.hpp"

namespace dpboot {
namespace {

// Floor on a subset's bootstrap variance.
constexpr double kMinVariance = 1e-6;

double SampleVariance(std::span<const double> values) {
  const double mean = SampleMean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

double NoisyScalar(double value, double sensitivity, double epsilon,
                   RandomStream& rng) {
  const double scale = LaplaceScale(sensitivity, epsilon);
  return scale > 0.0 ? value + SampleLaplace(0.0, scale, rng) : value;
}

}  // namespace

ConfidenceInterval FisherCi(double theta_hat, double sigma, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "alpha must lie in (0, 1)");
  }
  if (!(sigma >= 0.0)) {
    Fail(ErrorCode::kInvalidParameter, "standard error must be >= 0");
  }
  const double half = StdNormalQuantile(alpha / 2.0) * sigma;
  return {theta_hat - half, theta_hat + half};
}

std::size_t DefaultSubsetCount(std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(n), 0.4) - 1e-12));
}

double SampleMean(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kEmptyInput, "mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

Interval RescaledEstimateBounds(double l_min, double l_max, std::size_t n,
                                std::size_t subsets) {
  const double root = std::sqrt(static_cast<double>(n) /
                                static_cast<double>(subsets));
  return {l_min / root, l_max / root};
}

SaResult SubsampleAggregateCi(std::span<const double> data,
                              const InnerEstimator& estimator,
                              const SaConfig& config, RandomStream& rng) {
  const std::size_t n = data.size();
  const std::size_t m = config.subsets == 0 ? DefaultSubsetCount(n)
                                            : config.subsets;
  if (m < 2) Fail(ErrorCode::kInvalidConfig, "S&A needs at least 2 subsets");
  if (m > n) Fail(ErrorCode::kInvalidConfig, "more subsets than observations");
  if (!(config.l_min < config.l_max)) {
    Fail(ErrorCode::kInvalidConfig, "S&A needs L_min < L_max");
  }
  if (!(config.var_max > 0.0)) {
    Fail(ErrorCode::kInvalidConfig, "S&A needs var_max > 0");
  }
  if (!(config.x_min <= config.x_max)) {
    Fail(ErrorCode::kInvalidConfig, "S&A needs x_min <= x_max");
  }
  if (config.inner_resamples < 2) {
    Fail(ErrorCode::kInvalidConfig, "S&A needs at least 2 inner resamples");
  }
  ValidateEpsilon(config.epsilon);
  const double half_epsilon = config.epsilon / 2.0;

  std::vector<double> x = ClampData(data, Interval{config.x_min, config.x_max});
  {
    RandomStream shuffle_rng = rng.Child(0);
    std::shuffle(x.begin(), x.end(), shuffle_rng.engine());
  }

  const Interval l_star = RescaledEstimateBounds(config.l_min, config.l_max, n, m);
  const double var_star_max =
      config.var_max / (static_cast<double>(n) / static_cast<double>(m));

  std::vector<std::span<const double>> blocks;
  blocks.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t begin = i * n / m;
    const std::size_t end = (i + 1) * n / m;
    if (end == begin) Fail(ErrorCode::kInvalidConfig, "empty subset");
    blocks.emplace_back(x.data() + begin, end - begin);
  }

  SaResult result;
  result.subsets = m;

  double sum_c = 0.0;
  for (const auto& block : blocks) sum_c += l_star.Clamp(estimator(block));
  result.delta_mean = std::abs(l_star.upper - l_star.lower) / static_cast<double>(m);
  {
    RandomStream noise_rng = rng.Child(1);
    result.theta_dp = NoisyScalar(sum_c / static_cast<double>(m),
                                  result.delta_mean, half_epsilon, noise_rng);
  }

  const std::size_t resample_size = n / m;
  double sum_var = 0.0;
  std::vector<double> resample(resample_size);
  std::vector<double> inner(config.inner_resamples);
  for (std::size_t i = 0; i < m; ++i) {
    RandomStream inner_rng = rng.Child({2, static_cast<std::uint64_t>(i)});
    const auto& block = blocks[i];
    std::uniform_int_distribution<std::size_t> pick(0, block.size() - 1);
    for (std::size_t b = 0; b < config.inner_resamples; ++b) {
      for (double& v : resample) v = block[pick(inner_rng.engine())];
      inner[b] = l_star.Clamp(estimator(resample));
    }
    sum_var += std::clamp(SampleVariance(inner), kMinVariance, var_star_max);
  }
  result.delta_variance = var_star_max / static_cast<double>(m);
  double var_c;
  {
    RandomStream noise_rng = rng.Child(3);
    var_c = NoisyScalar(sum_var / static_cast<double>(m), result.delta_variance,
                        half_epsilon, noise_rng);
  }
  // Post-processing floor so the combined variance stays positive.
  var_c = std::max(var_c, kMinVariance);

  const double mean_scale = LaplaceScale(result.delta_mean, half_epsilon);
  result.var_dp =
      var_c / static_cast<double>(m) + 2.0 * mean_scale * mean_scale;
  const double half =
      StdNormalQuantile(config.alpha / 2.0) * std::sqrt(result.var_dp);
  result.ci = {result.theta_dp - half, result.theta_dp + half};
  return result;
}

}  // namespace dpboot
