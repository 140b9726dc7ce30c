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

// Comparison methods: plug-in asymptotic normal ("Fisher") intervals and a
// subsample-and-aggregate interval with privately estimated standard errors.

#ifndef DPBOOT_BASELINES_HPP_
#define DPBOOT_BASELINES_HPP_

#include <cstddef>
#include <functional>
#include <span>

#include "dpboot/bootstrap.hpp"
#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"

namespace dpboot {

// theta_hat -/+ z_{alpha/2} * sigma.
ConfidenceInterval FisherCi(double theta_hat, double sigma, double alpha);

struct SaConfig {
  std::size_t subsets = 0;  // M; 0 selects DefaultSubsetCount(n)
  double x_min = 0.0;
  double x_max = 0.0;
  double l_min = 0.0;
  double l_max = 0.0;
  double var_max = 0.0;
  double epsilon = 1.0;     // split in half between the mean and the variance
  double alpha = 0.05;
  std::size_t inner_resamples = 100;
};

// ceil(n^0.4).
std::size_t DefaultSubsetCount(std::size_t n);

using InnerEstimator = std::function<double(std::span<const double>)>;

double SampleMean(std::span<const double> values);

struct SaResult {
  double theta_dp = 0.0;
  ConfidenceInterval ci;
  double var_dp = 0.0;
  std::size_t subsets = 0;
  double delta_mean = 0.0;      // Delta_1
  double delta_variance = 0.0;  // Delta_2
};

// Estimate clamp bounds rescaled for subsets of size N/M: L / sqrt(N/M).
Interval RescaledEstimateBounds(double l_min, double l_max, std::size_t n,
                                std::size_t subsets);

SaResult SubsampleAggregateCi(std::span<const double> data,
                              const InnerEstimator& estimator,
                              const SaConfig& config, RandomStream& rng);

}  // namespace dpboot

#endif  // DPBOOT_BASELINES_HPP_
