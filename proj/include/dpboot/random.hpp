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

// Deterministic random streams and the scalar samplers every other module
// draws from. A stream is identified by (master_seed, path); two streams with
// the same identity produce the same sequence regardless of which thread
// consumes them, so replicate b of trial t can be regenerated in isolation.

#ifndef DPBOOT_RANDOM_HPP_
#define DPBOOT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dpboot {

class RandomStream {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t master_seed,
                        std::vector<std::uint64_t> path = {});

  // Substream at path + [index]. Independent of this stream's cursor.
  RandomStream Child(std::uint64_t index) const;
  RandomStream Child(std::initializer_list<std::uint64_t> indices) const;

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  Engine& engine() { return engine_; }

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double NextOpenUnit();

 private:
  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
  Engine engine_;
};

// Seed for the engine of (master_seed, path): a splitmix64 fold.
std::uint64_t DeriveStreamSeed(std::uint64_t master_seed,
                               std::span<const std::uint64_t> path);

double SampleLaplace(double loc, double scale, RandomStream& rng);
double SampleGaussian(double mean, double sd, RandomStream& rng);
std::int64_t SamplePoisson(double rate, RandomStream& rng);
double SampleGamma(double shape, double scale, RandomStream& rng);
int SampleBernoulli(double p, RandomStream& rng);
double SampleUniform(double lo, double hi, RandomStream& rng);

// 1-indexed rank of the (1 - gamma) empirical quantile among `count` sorted
// values: ceil((1 - gamma) * count), clamped to [1, count].
std::size_t QuantileRank(std::size_t count, double gamma);

// The (1 - gamma) quantile as the ceiling order statistic. Always returns an
// element of `samples`.
double EmpiricalQuantile(std::span<const double> samples, double gamma);

// Same convention, for input already sorted ascending.
double SortedQuantile(std::span<const double> sorted, double gamma);

double NormalCdf(double x);

// z such that Phi(z) = 1 - gamma.
double StdNormalQuantile(double gamma);

}  // namespace dpboot

#endif  // DPBOOT_RANDOM_HPP_
