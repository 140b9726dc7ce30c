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

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "dpboot/error.hpp"
#include "dpboot/harness.hpp"
#include "json.hpp"

namespace dpboot {
namespace {

using nlohmann::json;

[[noreturn]] void ConfigError(const std::string& message) {
  Fail(ErrorCode::kInvalidConfig, message);
}

double ParseEpsilon(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
  }
  ConfigError("epsilon must be a number or \"inf\"");
}

std::vector<double> DoubleList(const json& value, const char* key) {
  if (!value.is_array()) ConfigError(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const json& v : value) {
    if (!v.is_number()) ConfigError(std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<Interval> IntervalList(const json& value, const char* key) {
  if (!value.is_array()) ConfigError(std::string(key) + " must be an array");
  std::vector<Interval> out;
  for (const json& pair : value) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      ConfigError(std::string(key) + " entries must be [lower, upper]");
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

template <typename T>
void Read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace

std::string_view ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCoverage: return "coverage";
    case ExperimentKind::kWidth: return "width";
    case ExperimentKind::kBias: return "bias";
    case ExperimentKind::kSaCompare: return "sa-compare";
    case ExperimentKind::kOlsCoverage: return "ols";
  }
  return "unknown";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  if (name == "coverage") return ExperimentKind::kCoverage;
  if (name == "width") return ExperimentKind::kWidth;
  if (name == "bias") return ExperimentKind::kBias;
  if (name == "sa-compare") return ExperimentKind::kSaCompare;
  if (name == "ols" || name == "ols-coverage") return ExperimentKind::kOlsCoverage;
  ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

void ExperimentConfig::Validate() const {
  if (n_grid.empty()) ConfigError("n grid is empty");
  if (epsilon_grid.empty()) ConfigError("epsilon grid is empty");
  if (alpha_grid.empty()) ConfigError("alpha grid is empty");
  if (trials < 1) ConfigError("trials must be >= 1");
  if (replicates < 1) ConfigError("replicates must be >= 1");
  for (double eps : epsilon_grid) {
    if (std::isnan(eps) || !(eps > 0.0)) ConfigError("every epsilon must be > 0");
  }
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) ConfigError("every alpha must lie in (0, 1)");
  }
  for (std::size_t n : n_grid) {
    if (n < 2) ConfigError("every n must be >= 2");
  }
  if (bounds.mode == BoundsMode::kSurrogate && bounds.surrogate_size < 2) {
    ConfigError("surrogate size must be >= 2");
  }
  if (!(bounds.range_multiplier > 0.0)) {
    ConfigError("range multiplier must be > 0");
  }
  if (kind == ExperimentKind::kOlsCoverage) {
    if (ols.beta.empty()) ConfigError("ols.beta is empty");
    if (ols.budget_split.size() != 3) ConfigError("ols.budget_split needs 3 weights");
    for (double w : ols.budget_split) {
      if (!(w > 0.0)) ConfigError("ols.budget_split weights must be > 0");
    }
    for (std::size_t n : n_grid) {
      if (n <= ols.beta.size()) ConfigError("ols needs n > p");
    }
  } else {
    if (model.name.empty()) ConfigError("model.name is required");
    if (model.params.empty()) ConfigError("model.params is required");
  }
  if (kind == ExperimentKind::kBias && clamp_thresholds.empty() &&
      clamp_quantiles.empty()) {
    ConfigError("bias experiment needs clamp_thresholds or clamp_quantiles");
  }
  for (double q : clamp_quantiles) {
    if (!(q > 0.0 && q < 1.0)) ConfigError("clamp quantiles must lie in (0, 1)");
  }
}

namespace {

ExperimentConfig ParseImpl(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  if (auto it = doc.find("experiment"); it != doc.end()) {
    cfg.kind = ParseExperimentKind(it->get<std::string>());
  }
  if (auto it = doc.find("model"); it != doc.end()) {
    Read(*it, "name", cfg.model.name);
    if (it->contains("params")) cfg.model.params = DoubleList((*it)["params"], "model.params");
    if (it->contains("fixed")) cfg.model.fixed = DoubleList((*it)["fixed"], "model.fixed");
  }
  Read(doc, "target", cfg.target);
  if (auto it = doc.find("n"); it != doc.end()) {
    cfg.n_grid.clear();
    for (const json& v : *it) cfg.n_grid.push_back(v.get<std::size_t>());
  }
  if (auto it = doc.find("epsilon"); it != doc.end()) {
    cfg.epsilon_grid.clear();
    if (it->is_array()) {
      for (const json& v : *it) cfg.epsilon_grid.push_back(ParseEpsilon(v));
    } else {
      cfg.epsilon_grid.push_back(ParseEpsilon(*it));
    }
  }
  if (auto it = doc.find("coverage"); it != doc.end()) {
    cfg.alpha_grid.clear();
    for (double level : DoubleList(*it, "coverage")) cfg.alpha_grid.push_back(1.0 - level);
  }
  if (auto it = doc.find("alpha"); it != doc.end()) {
    cfg.alpha_grid = DoubleList(*it, "alpha");
  } else if (!doc.contains("coverage") &&
             (cfg.kind == ExperimentKind::kWidth ||
              cfg.kind == ExperimentKind::kBias ||
              cfg.kind == ExperimentKind::kSaCompare)) {
    cfg.alpha_grid = {0.05};
  }
  Read(doc, "trials", cfg.trials);
  Read(doc, "replicates", cfg.replicates);
  if (auto it = doc.find("bounds"); it != doc.end()) {
    std::string mode = "surrogate";
    Read(*it, "mode", mode);
    if (mode == "surrogate") {
      cfg.bounds.mode = BoundsMode::kSurrogate;
    } else if (mode == "explicit") {
      cfg.bounds.mode = BoundsMode::kExplicit;
    } else {
      ConfigError("bounds.mode must be 'surrogate' or 'explicit'");
    }
    Read(*it, "surrogate_size", cfg.bounds.surrogate_size);
    Read(*it, "range_multiplier", cfg.bounds.range_multiplier);
    if (it->contains("data")) cfg.bounds.data = IntervalList((*it)["data"], "bounds.data");
    if (it->contains("statistic")) {
      cfg.bounds.statistic = IntervalList((*it)["statistic"], "bounds.statistic");
    }
    if (cfg.bounds.mode == BoundsMode::kExplicit && cfg.bounds.data.empty()) {
      ConfigError("explicit bounds need bounds.data");
    }
  }
  if (auto it = doc.find("clamp_thresholds"); it != doc.end()) {
    cfg.clamp_thresholds = DoubleList(*it, "clamp_thresholds");
  }
  if (auto it = doc.find("clamp_quantiles"); it != doc.end()) {
    cfg.clamp_quantiles = DoubleList(*it, "clamp_quantiles");
  }
  if (auto it = doc.find("sa"); it != doc.end()) {
    Read(*it, "x_min", cfg.sa.x_min);
    Read(*it, "x_max", cfg.sa.x_max);
    Read(*it, "l_min", cfg.sa.l_min);
    Read(*it, "l_max", cfg.sa.l_max);
    Read(*it, "var_max", cfg.sa.var_max);
    Read(*it, "subsets", cfg.sa.subsets);
    Read(*it, "inner_resamples", cfg.sa.inner_resamples);
  }
  if (auto it = doc.find("ols"); it != doc.end()) {
    if (it->contains("beta")) cfg.ols.beta = DoubleList((*it)["beta"], "ols.beta");
    Read(*it, "x_half_width", cfg.ols.x_half_width);
    Read(*it, "noise_half_width", cfg.ols.noise_half_width);
    Read(*it, "y_bound", cfg.ols.y_bound);
    if (it->contains("residual_bound")) {
      Read(*it, "residual_bound", cfg.ols.residual_bound);
    } else {
      cfg.ols.residual_bound = 2.0 * cfg.ols.noise_half_width;
    }
    if (it->contains("budget_split")) {
      cfg.ols.budget_split = DoubleList((*it)["budget_split"], "ols.budget_split");
    }
  }
  Read(doc, "seed", cfg.seed);
  Read(doc, "threads", cfg.threads);
  Read(doc, "output", cfg.output);
  return cfg;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  try {
    return ParseImpl(json_text);
  } catch (const json::exception& e) {
    ConfigError(std::string("bad config: ") + e.what());
  }
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

}  // namespace dpboot
