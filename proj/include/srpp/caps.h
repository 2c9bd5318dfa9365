// Copyright 2026 The SRPP Toolkit Authors
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

// Discrepancy caps: how many records of a sampled minibatch can differ
// between two coupled datasets, in the worst case (tail cap) and in mean
// square (ms cap).

#ifndef SRPP_CAPS_H_
#define SRPP_CAPS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "srpp/rng.h"

namespace srpp {

enum class SubsamplingScheme { kWR, kWOR, kPoisson };

std::string_view SubsamplingSchemeName(SubsamplingScheme s);
absl::StatusOr<SubsamplingScheme> ParseSubsamplingScheme(std::string_view name);

struct SubsamplingSpec {
  SubsamplingScheme scheme = SubsamplingScheme::kWOR;
  int64_t population = 0;
  int64_t batch = 0;  // WR / WOR
  double rate = 0.0;  // Poisson

  static absl::StatusOr<SubsamplingSpec> Create(SubsamplingScheme scheme,
                                                int64_t population,
                                                int64_t batch, double rate = 0.0);
  // Fixed batch size for WR/WOR; the population for Poisson (its a.s. max).
  int64_t MaxBatch() const;
};

enum class CapMethod { kMonteCarlo, kBinomialTv, kHypergeometric, kLocalized, kUnion };

std::string_view CapMethodName(CapMethod m);

struct CapEstimate {
  double tail_cap = 0.0;  // K(delta)
  double delta = 0.0;     // tail level of tail_cap (0: deterministic)
  double ms_cap = 0.0;    // upper bound on E[K^2]
  double gamma = 0.0;     // estimation failure probability (0: exact)
  int64_t batch = 0;
  CapMethod method = CapMethod::kMonteCarlo;
};

// Monte-Carlo sufficient statistics of one (prior, pair) instance.
struct McCapSample {
  std::vector<int64_t> counts;  // sorted discrepancy counts
  int64_t batch = 0;
};

// Number of drawn positions j (with multiplicity) where x[j] != x_prime[j].
template <typename Record>
absl::StatusOr<int64_t> DiscrepancyCount(std::span<const Record> x,
                                         std::span<const Record> x_prime,
                                         std::span<const int64_t> indices) {
  if (x.size() != x_prime.size()) {
    return absl::InvalidArgumentError("coupled datasets differ in size");
  }
  int64_t count = 0;
  for (int64_t j : indices) {
    if (j < 0 || static_cast<size_t>(j) >= x.size()) {
      return absl::InvalidArgumentError("subsample index out of range");
    }
    if (!(x[static_cast<size_t>(j)] == x_prime[static_cast<size_t>(j)])) ++count;
  }
  return count;
}

// One coupled draw: two label vectors of equal length.
struct CoupledPair {
  std::vector<int32_t> x;
  std::vector<int32_t> x_prime;
};
using PairedSampler = std::function<CoupledPair(Rng&)>;

// Records i.i.d. Bernoulli(p) and Bernoulli(p_prime), drawn independently.
PairedSampler IndependentCouplingSampler(int64_t n, double p, double p_prime);
// Shared features, `edits` labels flipped at a uniformly random subset.
PairedSampler TwoWorldSampler(int64_t n, int64_t edits);
// Each record mismatched independently with probability tau.
PairedSampler MaximalCouplingSampler(int64_t n, double tau);

// WR: B i.i.d. uniform indices; WOR: a uniform B-subset (sorted);
// Poisson: independent inclusion at rate q, redrawn until nonempty.
std::vector<int64_t> Subsample(const SubsamplingSpec& sub, Rng& rng);
std::vector<int64_t> Subsample(const SubsamplingSpec& sub, uint64_t seed);

// Hoeffding / DKW caps from M observed discrepancy counts.
//   e = sqrt(log(2/gamma)/(2M)); ms = mean(K^2) + B^2 e;
//   tail = ceil((1-(delta-e)) M)-th order statistic if delta > e, else B.
absl::StatusOr<CapEstimate> CapsFromCounts(std::span<const int64_t> counts,
                                           int64_t batch, double delta_t,
                                           double gamma_t);

// Monte-Carlo caps: M coupled pairs and subsampling draws, OpenMP over
// replicates; replicate r uses stream (seed, r).
absl::StatusOr<CapEstimate> McCaps(const PairedSampler& sampler,
                                   const SubsamplingSpec& sub, int64_t M,
                                   double delta_t, double gamma_t, uint64_t seed);
// Same draws, also returning the sorted counts for later union bounds.
absl::StatusOr<McCapSample> McCapCounts(const PairedSampler& sampler,
                                        const SubsamplingSpec& sub, int64_t M,
                                        uint64_t seed);

// Closed-form caps when each sampled record mismatches with probability tau.
CapEstimate CapsFromTv(double tau, int64_t batch, double delta_t);

struct KMoments {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
};
// Moments of Hypergeometric(population, differing, batch).
absl::StatusOr<KMoments> HypergeometricK2(int64_t population, int64_t differing,
                                          int64_t batch);
// Moments of Binomial(batch, differing/population), the WR analogue.
KMoments BinomialK2(int64_t population, int64_t differing, int64_t batch);

// Deterministic caps when a secret touches at most d_max records.
CapEstimate LocalizedCap(int64_t d_max, int64_t batch);

// Recomputes every instance at gamma/N and takes coordinatewise maxima.
absl::StatusOr<CapEstimate> UnionCaps(std::span<const McCapSample> per_instance,
                                      double gamma_total, double delta_t);

// 1 - sum(delta_t) - sum(gamma_t): probability that every per-round cap holds.
double ResidualConfidence(std::span<const double> deltas,
                          std::span<const double> gammas);

namespace reference {

// Serial twin of McCapCounts.
absl::StatusOr<McCapSample> McCapCountsSerial(const PairedSampler& sampler,
                                              const SubsamplingSpec& sub,
                                              int64_t M, uint64_t seed);

}  // namespace reference
}  // namespace srpp

#endif  // SRPP_CAPS_H_
