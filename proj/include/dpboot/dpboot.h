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

// C interface to dpboot. All functions return a dpboot_status; on failure
// dpboot_last_error() describes the problem for the calling thread. Objects
// are opaque handles released with the matching *_destroy function. Strings
// returned through char** are released with dpboot_string_free.

#ifndef DPBOOT_DPBOOT_H_
#define DPBOOT_DPBOOT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DPBOOT_BUILDING_LIBRARY)
#define DPBOOT_API __declspec(dllexport)
#else
#define DPBOOT_API __declspec(dllimport)
#endif
#else
#define DPBOOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpboot_status {
  DPBOOT_OK = 0,
  DPBOOT_ERR_INVALID_PARAMETER = 1,
  DPBOOT_ERR_INVALID_BOUNDS = 2,
  DPBOOT_ERR_INVALID_BUDGET = 3,
  DPBOOT_ERR_SHAPE = 4,
  DPBOOT_ERR_EMPTY_INPUT = 5,
  DPBOOT_ERR_NUMERICAL_FAILURE = 6,
  DPBOOT_ERR_SINGULAR_RELEASE = 7,
  DPBOOT_ERR_REPLICATE_FAILURE = 8,
  DPBOOT_ERR_UNSUPPORTED_ESTIMATOR = 9,
  DPBOOT_ERR_INVALID_CONFIG = 10,
  DPBOOT_ERR_IO = 11,
  DPBOOT_ERR_NULL_ARGUMENT = 100,
  DPBOOT_ERR_INTERNAL = 101
} dpboot_status;

typedef struct dpboot_rng dpboot_rng;
typedef struct dpboot_model dpboot_model;
typedef struct dpboot_experiment dpboot_experiment;

DPBOOT_API const char* dpboot_version(void);
DPBOOT_API const char* dpboot_status_string(dpboot_status status);
// Message for the most recent failure on this thread ("" if none).
DPBOOT_API const char* dpboot_last_error(void);
DPBOOT_API void dpboot_string_free(char* s);

// Random streams. A stream is identified by (seed, path); children extend the
// path, so results never depend on scheduling.
DPBOOT_API dpboot_status dpboot_rng_create(uint64_t seed, const uint64_t* path,
                                           size_t path_len, dpboot_rng** out);
DPBOOT_API dpboot_status dpboot_rng_child(const dpboot_rng* rng, uint64_t index,
                                          dpboot_rng** out);
DPBOOT_API void dpboot_rng_destroy(dpboot_rng* rng);

DPBOOT_API dpboot_status dpboot_sample_laplace(dpboot_rng* rng, double loc,
                                               double scale, double* out);
DPBOOT_API dpboot_status dpboot_sample_gaussian(dpboot_rng* rng, double mean,
                                                double sd, double* out);

// out[i] = values[i] + Laplace(sensitivity / epsilon). epsilon may be +inf.
DPBOOT_API dpboot_status dpboot_laplace_mechanism(const double* values,
                                                  size_t len, double sensitivity,
                                                  double epsilon, dpboot_rng* rng,
                                                  double* out);

// z with P(Z > z) = gamma for standard normal Z.
DPBOOT_API dpboot_status dpboot_std_normal_quantile(double gamma, double* out);
// Upper-gamma empirical quantile (ceiling order statistic).
DPBOOT_API dpboot_status dpboot_empirical_quantile(const double* samples,
                                                   size_t len, double gamma,
                                                   double* out);
DPBOOT_API dpboot_status dpboot_fisher_ci(double estimate, double std_error,
                                          double alpha, double* lo, double* hi);

// Exponential-family models: "bernoulli", "poisson",
// "gaussian-known-variance" (fixed = {sigma}), "gaussian",
// "gamma-scale" (fixed = {shape}), "mvn-mean" (fixed = variances).
DPBOOT_API dpboot_status dpboot_model_create(const char* name,
                                             const double* fixed,
                                             size_t fixed_len,
                                             dpboot_model** out);
DPBOOT_API void dpboot_model_destroy(dpboot_model* model);
DPBOOT_API int dpboot_model_dim(const dpboot_model* model);
DPBOOT_API int dpboot_model_data_dim(const dpboot_model* model);

// Draws n observations at conventional parameters `params` into `out`
// (row-major, n x data_dim).
DPBOOT_API dpboot_status dpboot_model_sample(const dpboot_model* model,
                                             const double* params, size_t n,
                                             dpboot_rng* rng, double* out);

// Private MLE from row-major data (n x data_dim). Per-observation sufficient
// statistics are clamped to [t_lower[j], t_upper[j]] before release.
// params_out receives dim conventional parameters; stderr_out (optional)
// their plug-in standard errors.
DPBOOT_API dpboot_status dpboot_ssp_mle(const dpboot_model* model,
                                        const double* data, size_t n,
                                        const double* t_lower,
                                        const double* t_upper, double epsilon,
                                        dpboot_rng* rng, double* params_out,
                                        double* stderr_out);

// Experiments configured from JSON.
DPBOOT_API dpboot_status dpboot_experiment_create(const char* config_json,
                                                  dpboot_experiment** out);
DPBOOT_API dpboot_status dpboot_experiment_load(const char* path,
                                                dpboot_experiment** out);
DPBOOT_API void dpboot_experiment_destroy(dpboot_experiment* experiment);
// kind: "coverage", "width", "bias", "sa-compare" or "ols".
DPBOOT_API dpboot_status dpboot_experiment_set_kind(dpboot_experiment* experiment,
                                                    const char* kind);
DPBOOT_API dpboot_status dpboot_experiment_set_seed(dpboot_experiment* experiment,
                                                    uint64_t seed);
DPBOOT_API dpboot_status dpboot_experiment_set_threads(
    dpboot_experiment* experiment, int threads);
// Runs and writes CSV to out_path, or to the config's output path when
// out_path is NULL. failed_trials (optional) receives the failure count.
DPBOOT_API dpboot_status dpboot_experiment_run(dpboot_experiment* experiment,
                                               const char* out_path,
                                               size_t* failed_trials);
DPBOOT_API dpboot_status dpboot_experiment_run_to_string(
    dpboot_experiment* experiment, char** csv_out);

// Single-dataset analysis of a headerless numeric CSV file; json_out
// receives the result document.
DPBOOT_API dpboot_status dpboot_estimate_file(const char* config_json,
                                              const char* data_path,
                                              uint64_t seed, int threads,
                                              char** json_out);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // DPBOOT_DPBOOT_H_
