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

#include "dpboot/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpboot/error.hpp"

namespace dpboot {
namespace {

constexpr std::uint64_t kPathSalt = 0x9e3779b97f4a7c15ULL;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void RequireFinite(double value, const char* what) {
  if (!std::isfinite(value)) {
    Fail(ErrorCode::kInvalidParameter, std::string(what) + " must be finite");
  }
}

}  // namespace

std::uint64_t DeriveStreamSeed(std::uint64_t master_seed,
                               std::span<const std::uint64_t> path) {
  std::uint64_t h = SplitMix64(master_seed);
  for (std::uint64_t index : path) {
    h = SplitMix64(h ^ SplitMix64(index + kPathSalt));
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t master_seed,
                           std::vector<std::uint64_t> path)
    : master_seed_(master_seed),
      path_(std::move(path)),
      engine_(DeriveStreamSeed(master_seed_, path_)) {}

RandomStream RandomStream::Child(std::uint64_t index) const {
  std::vector<std::uint64_t> child_path = path_;
  child_path.push_back(index);
  return RandomStream(master_seed_, std::move(child_path));
}

RandomStream RandomStream::Child(
    std::initializer_list<std::uint64_t> indices) const {
  std::vector<std::uint64_t> child_path = path_;
  child_path.insert(child_path.end(), indices.begin(), indices.end());
  return RandomStream(master_seed_, std::move(child_path));
}

double RandomStream::NextOpenUnit() {
  // (k + 0.5) / 2^53 lies strictly inside (0, 1).
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double SampleLaplace(double loc, double scale, RandomStream& rng) {
  RequireFinite(loc, "Laplace location");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    Fail(ErrorCode::kInvalidParameter,
         "Laplace scale must be positive and finite");
  }
  const double u = rng.NextOpenUnit();
  if (u < 0.5) return loc + scale * std::log(2.0 * u);
  return loc - scale * std::log(2.0 * (1.0 - u));
}

double SampleGaussian(double mean, double sd, RandomStream& rng) {
  RequireFinite(mean, "Gaussian mean");
  if (!(sd >= 0.0) || !std::isfinite(sd)) {
    Fail(ErrorCode::kInvalidParameter,
         "Gaussian sd must be non-negative and finite");
  }
  if (sd == 0.0) return mean;
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng.engine());
}

std::int64_t SamplePoisson(double rate, RandomStream& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    Fail(ErrorCode::kInvalidParameter,
         "Poisson rate must be positive and finite");
  }
  std::poisson_distribution<std::int64_t> dist(rate);
  return dist(rng.engine());
}

double SampleGamma(double shape, double scale, RandomStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape) || !(scale > 0.0) ||
      !std::isfinite(scale)) {
    Fail(ErrorCode::kInvalidParameter,
         "Gamma shape and scale must be positive and finite");
  }
  std::gamma_distribution<double> dist(shape, scale);
  return dist(rng.engine());
}

int SampleBernoulli(double p, RandomStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "Bernoulli p must lie in [0, 1]");
  }
  return rng.NextOpenUnit() < p ? 1 : 0;
}

double SampleUniform(double lo, double hi, RandomStream& rng) {
  RequireFinite(lo, "uniform lower bound");
  RequireFinite(hi, "uniform upper bound");
  if (lo > hi) {
    Fail(ErrorCode::kInvalidParameter, "uniform requires lo <= hi");
  }
  return lo + (hi - lo) * rng.NextOpenUnit();
}

std::size_t QuantileRank(std::size_t count, double gamma) {
  if (count == 0) Fail(ErrorCode::kEmptyInput, "quantile of empty sample");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "quantile level must lie in (0, 1)");
  }
  // The small slack absorbs representation error in (1 - gamma) * count when
  // the product is mathematically an integer, e.g. 0.95 * 100.
  const double position = (1.0 - gamma) * static_cast<double>(count);
  const double rank = std::ceil(position - 1e-9 * std::max(1.0, position));
  return static_cast<std::size_t>(
      std::clamp(rank, 1.0, static_cast<double>(count)));
}

double SortedQuantile(std::span<const double> sorted, double gamma) {
  return sorted[QuantileRank(sorted.size(), gamma) - 1];
}

double EmpiricalQuantile(std::span<const double> samples, double gamma) {
  const std::size_t k = QuantileRank(samples.size(), gamma);
  std::vector<double> work(samples.begin(), samples.end());
  std::nth_element(work.begin(), work.begin() + static_cast<long>(k - 1),
                   work.end());
  return work[k - 1];
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double StdNormalQuantile(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "normal quantile level must lie in (0, 1)");
  }
  // Acklam's rational approximation for the lower-tail quantile of p, then
  // Halley steps against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double p = 1.0 - gamma;
  if (p == 0.5) return 0.0;
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Work with the smaller tail so that the residual is not lost to
  // cancellation near p = 1.
  const double kSqrt2Pi = std::sqrt(2.0 * 3.14159265358979323846);
  for (int i = 0; i < 2; ++i) {
    double e;
    if (x <= 0.0) {
      e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    } else {
      e = gamma - 0.5 * std::erfc(x / std::sqrt(2.0));
    }
    const double u = e * kSqrt2Pi * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

}  // namespace dpboot
