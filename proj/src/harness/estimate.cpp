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
#include <string>
#include <vector>

#include "dpboot/baselines.hpp"
#include "dpboot/error.hpp"
#include "dpboot/harness.hpp"
#include "dpboot/ols.hpp"
#include "json.hpp"

namespace dpboot {
namespace {

using nlohmann::json;

struct Common {
  double epsilon = 1.0;
  double alpha = 0.05;
  std::size_t replicates = 200;
};

double ReadEpsilon(const json& doc) {
  const json& v = doc.at("epsilon");
  if (v.is_string() && v.get<std::string>() == "inf") return kNoiseless;
  return v.get<double>();
}

std::vector<Interval> Intervals(const json& value) {
  std::vector<Interval> out;
  for (const json& pair : value) {
    if (!pair.is_array() || pair.size() != 2) {
      Fail(ErrorCode::kInvalidConfig, "bounds entries must be [lower, upper]");
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

json Pair(const ConfidenceInterval& ci) { return json::array({ci.lo, ci.hi}); }

// Finite numbers are emitted as-is; NaN and infinities become null.
json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json ModelEstimate(const json& doc, const Common& c, const Eigen::MatrixXd& data,
                   RandomStream& rng, int threads) {
  const json& m = doc.at("model");
  std::vector<double> fixed;
  if (m.contains("fixed")) fixed = m.at("fixed").get<std::vector<double>>();
  const ModelPtr model = MakeModel(m.at("name").get<std::string>(), fixed);
  if (!doc.contains("bounds") || !doc.at("bounds").contains("data")) {
    Fail(ErrorCode::kInvalidConfig, "estimate needs bounds.data");
  }
  ModelBounds bounds;
  bounds.data = Bounds(Intervals(doc.at("bounds").at("data")));
  bounds.statistic = doc.at("bounds").contains("statistic")
                         ? Bounds(Intervals(doc.at("bounds").at("statistic")))
                         : StatisticBoundsFromData(*model, bounds.data);
  const SspMleEstimator estimator(model, bounds, c.epsilon);
  BootstrapOptions opts;
  opts.threads = threads;
  opts.max_redraws = 10;
  const BootstrapRun run =
      RunParametricBootstrap(estimator, data, c.replicates, rng, opts);

  json params = json::array();
  const std::vector<std::string> names = model->param_names();
  for (int j = 0; j < model->dim(); ++j) {
    const BootstrapResult r = Marginal(run, j);
    const BiasCorrection bc = BiasCorrect(r);
    json p;
    p["name"] = names[static_cast<std::size_t>(j)];
    p["estimate"] = Number(r.tau_hat);
    p["std_error"] = Number(*r.sigma_hat);
    p["bias"] = Number(bc.bias);
    p["bias_corrected"] = Number(bc.tau_bc);
    p["pb_efron"] = Pair(EfronPercentileInterval(r, c.alpha));
    p["pb_pivotal"] = Pair(PivotalInterval(r, c.alpha));
    p["pb_studentized"] = Pair(StudentizedPivotalInterval(r, c.alpha));
    p["fisher_private"] = Pair(FisherCi(r.tau_hat, *r.sigma_hat, c.alpha));
    params.push_back(p);
  }
  json out;
  out["kind"] = "model";
  out["model"] = std::string(model->name());
  out["parameters"] = params;
  out["replicate_failures"] = run.failures;
  return out;
}

json RegressionEstimate(const json& doc, const Common& c,
                        const Eigen::MatrixXd& data, RandomStream& rng,
                        int threads) {
  const json& r = doc.at("regression");
  if (data.cols() < 2) {
    Fail(ErrorCode::kShape, "regression data needs covariates plus a response column");
  }
  const Eigen::Index p = data.cols() - 1;
  RegressionData rd{data.leftCols(p), data.col(p)};
  RegressionBounds bounds;
  bounds.x = Bounds(Intervals(r.at("x_bounds")));
  const auto y = r.at("y_bounds").get<std::vector<double>>();
  if (y.size() != 2) Fail(ErrorCode::kInvalidConfig, "y_bounds must be [lower, upper]");
  bounds.y = {y[0], y[1]};
  bounds.residual_bound = r.at("residual_bound").get<double>();
  std::vector<double> split{1.0, 1.0, 1.0};
  if (r.contains("budget_split")) split = r.at("budget_split").get<std::vector<double>>();
  if (split.size() != 3) Fail(ErrorCode::kInvalidConfig, "budget_split needs 3 weights");
  const double total = split[0] + split[1] + split[2];
  PrivacyBudget budget;
  budget.Add(kGramBudget, c.epsilon * split[0] / total);
  budget.Add(kXtyBudget, c.epsilon * split[1] / total);
  budget.Add(kSigma2Budget, c.epsilon * split[2] / total);

  // Rows outside the public response bounds are dropped, as the
  // sensitivity analysis assumes.
  const ColumnBound keep[] = {{p, bounds.y}};
  const FilteredRows kept = DropOutOfBounds(data, keep);
  rd = {ClampData(Eigen::MatrixXd(kept.rows.leftCols(p)), bounds.x),
        kept.rows.col(p)};

  RandomStream release_rng = rng.Child(0);
  const RegressionRelease release = SspOlsRelease(rd, bounds, budget, release_rng);
  const HybridBootstrap hybrid(release);
  Estimate point;
  point.theta = release.beta_hat;
  point.tau = release.beta_hat;
  BootstrapOptions opts;
  opts.threads = threads;
  opts.max_redraws = 10;
  RandomStream boot_rng = rng.Child(1);
  const BootstrapRun run = RunReplicateBootstrap(point, hybrid.Generator(),
                                                 c.replicates, boot_rng, opts);
  json params = json::array();
  for (Eigen::Index j = 0; j < p; ++j) {
    const BootstrapResult m = Marginal(run, j);
    const BiasCorrection bc = BiasCorrect(m);
    json e;
    e["name"] = "beta" + std::to_string(j);
    e["estimate"] = Number(m.tau_hat);
    e["bias"] = Number(bc.bias);
    e["bias_corrected"] = Number(bc.tau_bc);
    e["pb_efron"] = Pair(EfronPercentileInterval(m, c.alpha));
    e["pb_pivotal"] = Pair(PivotalInterval(m, c.alpha));
    e["fisher_private"] = Pair(OlsFisherCi(release, j, c.alpha));
    params.push_back(e);
  }
  json out;
  out["kind"] = "regression";
  out["sigma2"] = Number(release.sigma2_hat);
  out["dropped_rows"] = kept.dropped;
  out["parameters"] = params;
  out["replicate_failures"] = run.failures;
  return out;
}

}  // namespace

std::string EstimateFromData(std::string_view config_json,
                             const Eigen::MatrixXd& data, std::uint64_t seed,
                             int threads) {
  json doc;
  try {
    doc = json::parse(config_json);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    Common c;
    c.epsilon = ReadEpsilon(doc);
    ValidateEpsilon(c.epsilon);
    if (doc.contains("alpha")) c.alpha = doc.at("alpha").get<double>();
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
      Fail(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1)");
    }
    if (doc.contains("replicates")) c.replicates = doc.at("replicates").get<std::size_t>();
    RandomStream rng(seed);
    json out;
    if (doc.contains("regression")) {
      out = RegressionEstimate(doc, c, data, rng, threads);
    } else if (doc.contains("model")) {
      out = ModelEstimate(doc, c, data, rng, threads);
    } else {
      Fail(ErrorCode::kInvalidConfig, "config needs a 'model' or 'regression' section");
    }
    out["n"] = data.rows();
    out["epsilon"] = Number(c.epsilon);
    out["alpha"] = c.alpha;
    out["replicates"] = c.replicates;
    out["seed"] = seed;
    return out.dump(2);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("bad estimate config: ") + e.what());
  }
}

}  // namespace dpboot
