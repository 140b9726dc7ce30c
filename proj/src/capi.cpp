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

#include "dpboot/dpboot.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "dpboot/error.hpp"
#include "dpboot/expfam.hpp"
#include "dpboot/harness.hpp"
#include "dpboot/privacy.hpp"
#include "dpboot/random.hpp"
#include "dpboot/baselines.hpp"

struct dpboot_rng {
  dpboot::RandomStream stream;
};

struct dpboot_model {
  dpboot::ModelPtr model;
};

struct dpboot_experiment {
  dpboot::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

dpboot_status Record(dpboot_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
dpboot_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return DPBOOT_OK;
  } catch (const dpboot::Error& e) {
    return Record(static_cast<dpboot_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return Record(DPBOOT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(DPBOOT_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(DPBOOT_ERR_INTERNAL, "unknown error");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

#define DPBOOT_REQUIRE(ptr)                                        \
  do {                                                             \
    if ((ptr) == nullptr) {                                        \
      return Record(DPBOOT_ERR_NULL_ARGUMENT, #ptr " is null");    \
    }                                                              \
  } while (0)

extern "C" {

const char* dpboot_version(void) { return "0.1.0"; }

const char* dpboot_status_string(dpboot_status status) {
  switch (status) {
    case DPBOOT_OK: return "ok";
    case DPBOOT_ERR_NULL_ARGUMENT: return "null-argument";
    case DPBOOT_ERR_INTERNAL: return "internal";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 11) {
    return dpboot::ErrorCodeName(static_cast<dpboot::ErrorCode>(code)).data();
  }
  return "unknown-status";
}

const char* dpboot_last_error(void) { return last_error.c_str(); }

void dpboot_string_free(char* s) { std::free(s); }

dpboot_status dpboot_rng_create(uint64_t seed, const uint64_t* path,
                                size_t path_len, dpboot_rng** out) {
  DPBOOT_REQUIRE(out);
  if (path_len > 0) DPBOOT_REQUIRE(path);
  return Guard([&] {
    std::vector<std::uint64_t> p(path, path + path_len);
    *out = new dpboot_rng{dpboot::RandomStream(seed, std::move(p))};
  });
}

dpboot_status dpboot_rng_child(const dpboot_rng* rng, uint64_t index,
                               dpboot_rng** out) {
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(out);
  return Guard([&] { *out = new dpboot_rng{rng->stream.Child(index)}; });
}

void dpboot_rng_destroy(dpboot_rng* rng) { delete rng; }

dpboot_status dpboot_sample_laplace(dpboot_rng* rng, double loc, double scale,
                                    double* out) {
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(out);
  return Guard([&] { *out = dpboot::SampleLaplace(loc, scale, rng->stream); });
}

dpboot_status dpboot_sample_gaussian(dpboot_rng* rng, double mean, double sd,
                                     double* out) {
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(out);
  return Guard([&] { *out = dpboot::SampleGaussian(mean, sd, rng->stream); });
}

dpboot_status dpboot_laplace_mechanism(const double* values, size_t len,
                                       double sensitivity, double epsilon,
                                       dpboot_rng* rng, double* out) {
  DPBOOT_REQUIRE(values);
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(out);
  return Guard([&] {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
        values, static_cast<Eigen::Index>(len));
    const dpboot::NoisyVector noisy =
        dpboot::LaplaceMechanism(v, sensitivity, epsilon, rng->stream);
    Eigen::Map<Eigen::VectorXd>(out, static_cast<Eigen::Index>(len)) = noisy.values;
  });
}

dpboot_status dpboot_std_normal_quantile(double gamma, double* out) {
  DPBOOT_REQUIRE(out);
  return Guard([&] { *out = dpboot::StdNormalQuantile(gamma); });
}

dpboot_status dpboot_empirical_quantile(const double* samples, size_t len,
                                        double gamma, double* out) {
  DPBOOT_REQUIRE(samples);
  DPBOOT_REQUIRE(out);
  return Guard([&] {
    *out = dpboot::EmpiricalQuantile(std::span<const double>(samples, len), gamma);
  });
}

dpboot_status dpboot_fisher_ci(double estimate, double std_error, double alpha,
                               double* lo, double* hi) {
  DPBOOT_REQUIRE(lo);
  DPBOOT_REQUIRE(hi);
  return Guard([&] {
    const dpboot::ConfidenceInterval ci =
        dpboot::FisherCi(estimate, std_error, alpha);
    *lo = ci.lo;
    *hi = ci.hi;
  });
}

dpboot_status dpboot_model_create(const char* name, const double* fixed,
                                  size_t fixed_len, dpboot_model** out) {
  DPBOOT_REQUIRE(name);
  DPBOOT_REQUIRE(out);
  if (fixed_len > 0) DPBOOT_REQUIRE(fixed);
  return Guard([&] {
    *out = new dpboot_model{
        dpboot::MakeModel(name, std::span<const double>(fixed, fixed_len))};
  });
}

void dpboot_model_destroy(dpboot_model* model) { delete model; }

int dpboot_model_dim(const dpboot_model* model) {
  return model ? model->model->dim() : -1;
}

int dpboot_model_data_dim(const dpboot_model* model) {
  return model ? model->model->data_dim() : -1;
}

dpboot_status dpboot_model_sample(const dpboot_model* model,
                                  const double* params, size_t n,
                                  dpboot_rng* rng, double* out) {
  DPBOOT_REQUIRE(model);
  DPBOOT_REQUIRE(params);
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(out);
  return Guard([&] {
    const dpboot::ExpFamModel& m = *model->model;
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(params, m.dim());
    const Eigen::MatrixXd sample =
        m.Sample(m.ToNatural(p), static_cast<Eigen::Index>(n), rng->stream);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>;
    Eigen::Map<RowMajor>(out, sample.rows(), sample.cols()) = sample;
  });
}

dpboot_status dpboot_ssp_mle(const dpboot_model* model, const double* data,
                             size_t n, const double* t_lower,
                             const double* t_upper, double epsilon,
                             dpboot_rng* rng, double* params_out,
                             double* stderr_out) {
  DPBOOT_REQUIRE(model);
  DPBOOT_REQUIRE(data);
  DPBOOT_REQUIRE(t_lower);
  DPBOOT_REQUIRE(t_upper);
  DPBOOT_REQUIRE(rng);
  DPBOOT_REQUIRE(params_out);
  return Guard([&] {
    const dpboot::ExpFamModel& m = *model->model;
    if (n == 0) {
      throw dpboot::Error(dpboot::ErrorCode::kEmptyInput, "no data rows");
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>;
    const Eigen::MatrixXd x = Eigen::Map<const RowMajor>(
        data, static_cast<Eigen::Index>(n), m.data_dim());
    std::vector<dpboot::Interval> iv;
    for (int j = 0; j < m.dim(); ++j) iv.push_back({t_lower[j], t_upper[j]});
    const dpboot::NoisyVector release =
        dpboot::SspRelease(m, x, dpboot::Bounds(std::move(iv)), epsilon, rng->stream);
    const Eigen::VectorXd theta =
        dpboot::SspMle(m, release.values, static_cast<Eigen::Index>(n));
    const Eigen::VectorXd tau = m.FromNatural(theta);
    for (int j = 0; j < m.dim(); ++j) {
      params_out[j] = tau[j];
      if (stderr_out != nullptr) {
        stderr_out[j] = dpboot::ConventionalStdErr(m, theta,
                                                   static_cast<Eigen::Index>(n), j);
      }
    }
  });
}

dpboot_status dpboot_experiment_create(const char* config_json,
                                       dpboot_experiment** out) {
  DPBOOT_REQUIRE(config_json);
  DPBOOT_REQUIRE(out);
  return Guard([&] {
    *out = new dpboot_experiment{dpboot::ParseExperimentConfig(config_json)};
  });
}

dpboot_status dpboot_experiment_load(const char* path, dpboot_experiment** out) {
  DPBOOT_REQUIRE(path);
  DPBOOT_REQUIRE(out);
  return Guard([&] {
    *out = new dpboot_experiment{dpboot::LoadExperimentConfig(path)};
  });
}

void dpboot_experiment_destroy(dpboot_experiment* experiment) { delete experiment; }

dpboot_status dpboot_experiment_set_kind(dpboot_experiment* experiment,
                                         const char* kind) {
  DPBOOT_REQUIRE(experiment);
  DPBOOT_REQUIRE(kind);
  return Guard([&] {
    experiment->config.kind = dpboot::ParseExperimentKind(kind);
    experiment->config.Validate();
  });
}

dpboot_status dpboot_experiment_set_seed(dpboot_experiment* experiment,
                                         uint64_t seed) {
  DPBOOT_REQUIRE(experiment);
  experiment->config.seed = seed;
  return DPBOOT_OK;
}

dpboot_status dpboot_experiment_set_threads(dpboot_experiment* experiment,
                                            int threads) {
  DPBOOT_REQUIRE(experiment);
  experiment->config.threads = threads;
  return DPBOOT_OK;
}

dpboot_status dpboot_experiment_run(dpboot_experiment* experiment,
                                    const char* out_path, size_t* failed_trials) {
  DPBOOT_REQUIRE(experiment);
  return Guard([&] {
    const std::string path = out_path ? out_path : experiment->config.output;
    if (path.empty()) {
      throw dpboot::Error(dpboot::ErrorCode::kInvalidConfig,
                          "no output path given");
    }
    const dpboot::ExperimentOutput result = dpboot::RunExperiment(experiment->config);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw dpboot::Error(dpboot::ErrorCode::kIo, "cannot write '" + path + "'");
    }
    dpboot::WriteCsv(result, out);
    out.flush();
    if (!out) throw dpboot::Error(dpboot::ErrorCode::kIo, "write failed: " + path);
    if (failed_trials) *failed_trials = result.failed_trials;
  });
}

dpboot_status dpboot_experiment_run_to_string(dpboot_experiment* experiment,
                                              char** csv_out) {
  DPBOOT_REQUIRE(experiment);
  DPBOOT_REQUIRE(csv_out);
  return Guard([&] {
    *csv_out = CopyString(dpboot::FormatCsv(dpboot::RunExperiment(experiment->config)));
  });
}

dpboot_status dpboot_estimate_file(const char* config_json, const char* data_path,
                                   uint64_t seed, int threads, char** json_out) {
  DPBOOT_REQUIRE(config_json);
  DPBOOT_REQUIRE(data_path);
  DPBOOT_REQUIRE(json_out);
  return Guard([&] {
    const Eigen::MatrixXd data = dpboot::ReadNumericCsvFile(data_path);
    *json_out = CopyString(dpboot::EstimateFromData(config_json, data, seed, threads));
  });
}

}  // extern "C"
