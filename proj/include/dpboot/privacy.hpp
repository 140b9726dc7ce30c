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

// Sensitivity accounting for additive statistics, the vector Laplace
// mechanism, data bounding (clamp or drop) and privacy-budget bookkeeping.

#ifndef DPBOOT_PRIVACY_HPP_
#define DPBOOT_PRIVACY_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpboot/random.hpp"

namespace dpboot {

// Passing this as epsilon disables noise entirely. Used to compare private
// estimators against their non-private counterparts.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double Clamp(double v) const { return v < lower ? lower : (v > upper ? upper : v); }
  bool Contains(double v) const { return v >= lower && v <= upper; }
};

// Per-dimension closed intervals; finite with lower <= upper everywhere.
class Bounds {
 public:
  Bounds() = default;
  explicit Bounds(std::vector<Interval> intervals);
  static Bounds Repeat(std::size_t dim, double lower, double upper);

  std::size_t dim() const { return intervals_.size(); }
  const Interval& operator[](std::size_t j) const { return intervals_[j]; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  std::vector<double> Widths() const;

  // Expands every interval about its midpoint by `factor` (>= 0).
  Bounds Scaled(double factor) const;

 private:
  std::vector<Interval> intervals_;
};

class PrivacyBudget {
 public:
  PrivacyBudget() = default;

  // Splits `total` equally across `labels`.
  static PrivacyBudget EqualSplit(double total,
                                  const std::vector<std::string>& labels);

  PrivacyBudget& Add(std::string label, double epsilon);

  double epsilon(std::string_view label) const;
  const std::vector<std::pair<std::string, double>>& parts() const {
    return parts_;
  }
  double total() const;

 private:
  std::vector<std::pair<std::string, double>> parts_;
};

struct NoisyVector {
  Eigen::VectorXd values;
  double scale = 0.0;        // Laplace scale b = sensitivity / epsilon
  double sensitivity = 0.0;
  double epsilon = kNoiseless;
};

// L1 sensitivity bound for f(X) = sum_i g(x_i): sum of coordinate widths.
double AdditiveSensitivity(std::span<const double> widths);

void ValidateEpsilon(double epsilon);

// Laplace scale for (sensitivity, epsilon); zero in noiseless mode.
double LaplaceScale(double sensitivity, double epsilon);

NoisyVector LaplaceMechanism(const Eigen::VectorXd& values, double sensitivity,
                             double epsilon, RandomStream& rng);

// Coordinatewise projection of each column j of `data` into bounds[j].
Eigen::MatrixXd ClampData(const Eigen::MatrixXd& data, const Bounds& bounds);
std::vector<double> ClampData(std::span<const double> data,
                              const Interval& bounds);

struct ColumnBound {
  Eigen::Index column = 0;
  Interval bounds;
};

struct FilteredRows {
  Eigen::MatrixXd rows;
  std::size_t dropped = 0;
};

// Keeps rows whose designated columns all lie inside their bounds.
FilteredRows DropOutOfBounds(const Eigen::MatrixXd& rows,
                             std::span<const ColumnBound> bounds);

}  // namespace dpboot

#endif  // DPBOOT_PRIVACY_HPP_
