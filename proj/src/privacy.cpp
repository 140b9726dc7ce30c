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

#include "dpboot/privacy.hpp"

#include <cmath>

#include "dpboot/error.hpp"

namespace dpboot {

Bounds::Bounds(std::vector<Interval> intervals)
    : intervals_(std::move(intervals)) {
  for (const Interval& iv : intervals_) {
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
      Fail(ErrorCode::kInvalidBounds, "bounds must be finite");
    }
    if (iv.lower > iv.upper) {
      Fail(ErrorCode::kInvalidBounds, "bounds require lower <= upper");
    }
  }
}

Bounds Bounds::Repeat(std::size_t dim, double lower, double upper) {
  return Bounds(std::vector<Interval>(dim, Interval{lower, upper}));
}

std::vector<double> Bounds::Widths() const {
  std::vector<double> widths;
  widths.reserve(intervals_.size());
  for (const Interval& iv : intervals_) widths.push_back(iv.width());
  return widths;
}

Bounds Bounds::Scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    Fail(ErrorCode::kInvalidBounds, "range multiplier must be finite and >= 0");
  }
  std::vector<Interval> scaled;
  scaled.reserve(intervals_.size());
  for (const Interval& iv : intervals_) {
    const double mid = 0.5 * (iv.lower + iv.upper);
    const double half = 0.5 * iv.width() * factor;
    scaled.push_back({mid - half, mid + half});
  }
  return Bounds(std::move(scaled));
}

PrivacyBudget PrivacyBudget::EqualSplit(double total,
                                        const std::vector<std::string>& labels) {
  ValidateEpsilon(total);
  if (labels.empty()) Fail(ErrorCode::kInvalidBudget, "budget needs a label");
  PrivacyBudget budget;
  const double share = total / static_cast<double>(labels.size());
  for (const std::string& label : labels) budget.Add(label, share);
  return budget;
}

PrivacyBudget& PrivacyBudget::Add(std::string label, double epsilon) {
  ValidateEpsilon(epsilon);
  parts_.emplace_back(std::move(label), epsilon);
  return *this;
}

double PrivacyBudget::epsilon(std::string_view label) const {
  for (const auto& [name, eps] : parts_) {
    if (name == label) return eps;
  }
  Fail(ErrorCode::kInvalidBudget,
       "no budget component labelled '" + std::string(label) + "'");
}

double PrivacyBudget::total() const {
  double sum = 0.0;
  for (const auto& part : parts_) sum += part.second;
  return sum;
}

double AdditiveSensitivity(std::span<const double> widths) {
  double total = 0.0;
  for (double w : widths) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kInvalidBounds, "widths must be finite and >= 0");
    }
    total += w;
  }
  return total;
}

void ValidateEpsilon(double epsilon) {
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    Fail(ErrorCode::kInvalidBudget, "epsilon must be > 0 (or +inf)");
  }
}

double LaplaceScale(double sensitivity, double epsilon) {
  ValidateEpsilon(epsilon);
  if (!std::isfinite(sensitivity) || sensitivity < 0.0) {
    Fail(ErrorCode::kInvalidParameter, "sensitivity must be finite and >= 0");
  }
  if (std::isinf(epsilon)) return 0.0;
  return sensitivity / epsilon;
}

NoisyVector LaplaceMechanism(const Eigen::VectorXd& values, double sensitivity,
                             double epsilon, RandomStream& rng) {
  NoisyVector out;
  out.scale = LaplaceScale(sensitivity, epsilon);
  out.sensitivity = sensitivity;
  out.epsilon = epsilon;
  out.values = values;
  if (out.scale > 0.0) {
    for (Eigen::Index j = 0; j < out.values.size(); ++j) {
      out.values[j] += SampleLaplace(0.0, out.scale, rng);
    }
  }
  return out;
}

Eigen::MatrixXd ClampData(const Eigen::MatrixXd& data, const Bounds& bounds) {
  if (static_cast<std::size_t>(data.cols()) != bounds.dim()) {
    Fail(ErrorCode::kShape, "bounds dimension does not match data columns");
  }
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const Interval& iv = bounds[static_cast<std::size_t>(j)];
    out.col(j) = data.col(j).cwiseMax(iv.lower).cwiseMin(iv.upper);
  }
  return out;
}

std::vector<double> ClampData(std::span<const double> data,
                              const Interval& bounds) {
  Bounds{{bounds}};  // validates
  std::vector<double> out;
  out.reserve(data.size());
  for (double v : data) out.push_back(bounds.Clamp(v));
  return out;
}

FilteredRows DropOutOfBounds(const Eigen::MatrixXd& rows,
                             std::span<const ColumnBound> bounds) {
  for (const ColumnBound& cb : bounds) {
    if (cb.column < 0 || cb.column >= rows.cols()) {
      Fail(ErrorCode::kShape, "bounded column index out of range");
    }
  }
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    bool inside = true;
    for (const ColumnBound& cb : bounds) {
      if (!cb.bounds.Contains(rows(i, cb.column))) {
        inside = false;
        break;
      }
    }
    if (inside) keep.push_back(i);
  }
  FilteredRows out;
  out.dropped = static_cast<std::size_t>(rows.rows()) - keep.size();
  out.rows.resize(static_cast<Eigen::Index>(keep.size()), rows.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.rows.row(static_cast<Eigen::Index>(r)) = rows.row(keep[r]);
  }
  return out;
}

}  // namespace dpboot
