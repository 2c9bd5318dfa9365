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

#include "srpp/caps.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "caps_internal.h"

namespace srpp {

std::string_view SubsamplingSchemeName(SubsamplingScheme s) {
  switch (s) {
    case SubsamplingScheme::kWR:
      return "wr";
    case SubsamplingScheme::kWOR:
      return "wor";
    case SubsamplingScheme::kPoisson:
      return "poisson";
  }
  return "unknown";
}

absl::StatusOr<SubsamplingScheme> ParseSubsamplingScheme(std::string_view name) {
  for (SubsamplingScheme s : {SubsamplingScheme::kWR, SubsamplingScheme::kWOR,
                              SubsamplingScheme::kPoisson}) {
    if (SubsamplingSchemeName(s) == name) return s;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown subsampling scheme '",
                                                 std::string(name), "'"));
}

std::string_view CapMethodName(CapMethod m) {
  switch (m) {
    case CapMethod::kMonteCarlo:
      return "monte_carlo";
    case CapMethod::kBinomialTv:
      return "binomial_tv";
    case CapMethod::kHypergeometric:
      return "hypergeometric";
    case CapMethod::kLocalized:
      return "localized";
    case CapMethod::kUnion:
      return "union";
  }
  return "unknown";
}

absl::StatusOr<SubsamplingSpec> SubsamplingSpec::Create(SubsamplingScheme scheme,
                                                        int64_t population,
                                                        int64_t batch,
                                                        double rate) {
  if (population < 1) {
    return absl::InvalidArgumentError("population must be >= 1");
  }
  switch (scheme) {
    case SubsamplingScheme::kWR:
      if (batch < 1) return absl::InvalidArgumentError("WR batch must be >= 1");
      break;
    case SubsamplingScheme::kWOR:
      if (batch < 1 || batch > population) {
        return absl::InvalidArgumentError(absl::StrCat(
            "WOR batch must lie in [1, ", population, "], got ", batch));
      }
      break;
    case SubsamplingScheme::kPoisson:
      if (!(rate > 0.0 && rate <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("Poisson rate must lie in (0,1], got ", rate));
      }
      break;
  }
  return SubsamplingSpec{scheme, population, batch, rate};
}

int64_t SubsamplingSpec::MaxBatch() const {
  return scheme == SubsamplingScheme::kPoisson ? population : batch;
}

PairedSampler IndependentCouplingSampler(int64_t n, double p, double p_prime) {
  return [n, p, p_prime](Rng& rng) {
    CoupledPair pair;
    pair.x.resize(static_cast<size_t>(n));
    pair.x_prime.resize(static_cast<size_t>(n));
    for (int64_t j = 0; j < n; ++j) {
      pair.x[static_cast<size_t>(j)] = rng.Bernoulli(p) ? 1 : 0;
      pair.x_prime[static_cast<size_t>(j)] = rng.Bernoulli(p_prime) ? 1 : 0;
    }
    return pair;
  };
}

PairedSampler TwoWorldSampler(int64_t n, int64_t edits) {
  return [n, edits](Rng& rng) {
    CoupledPair pair;
    pair.x.assign(static_cast<size_t>(n), 0);
    pair.x_prime.assign(static_cast<size_t>(n), 0);
    SubsamplingSpec pick{SubsamplingScheme::kWOR, n, std::min(edits, n), 0.0};
    if (pick.batch > 0) {
      for (int64_t j : Subsample(pick, rng)) pair.x_prime[static_cast<size_t>(j)] = 1;
    }
    return pair;
  };
}

PairedSampler MaximalCouplingSampler(int64_t n, double tau) {
  return [n, tau](Rng& rng) {
    CoupledPair pair;
    pair.x.assign(static_cast<size_t>(n), 0);
    pair.x_prime.assign(static_cast<size_t>(n), 0);
    for (int64_t j = 0; j < n; ++j) {
      if (rng.Bernoulli(tau)) pair.x_prime[static_cast<size_t>(j)] = 1;
    }
    return pair;
  };
}

std::vector<int64_t> Subsample(const SubsamplingSpec& sub, Rng& rng) {
  const int64_t n = sub.population;
  std::vector<int64_t> out;
  switch (sub.scheme) {
    case SubsamplingScheme::kWR:
      out.reserve(static_cast<size_t>(sub.batch));
      for (int64_t b = 0; b < sub.batch; ++b) {
        out.push_back(static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(n))));
      }
      break;
    case SubsamplingScheme::kWOR: {
      if (sub.batch == n) {
        out.resize(static_cast<size_t>(n));
        for (int64_t j = 0; j < n; ++j) out[static_cast<size_t>(j)] = j;
        break;
      }
      // Floyd's algorithm: O(B) expected work, uniform over B-subsets.
      std::unordered_set<int64_t> chosen;
      chosen.reserve(static_cast<size_t>(sub.batch) * 2);
      for (int64_t j = n - sub.batch; j < n; ++j) {
        const auto t = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(j + 1)));
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      out.assign(chosen.begin(), chosen.end());
      std::sort(out.begin(), out.end());
      break;
    }
    case SubsamplingScheme::kPoisson: {
      if (sub.rate >= 1.0) {
        out.resize(static_cast<size_t>(n));
        for (int64_t j = 0; j < n; ++j) out[static_cast<size_t>(j)] = j;
        break;
      }
      const double log_skip = std::log1p(-sub.rate);
      while (out.empty()) {
        // Geometric gaps between included indices.
        double pos = -1.0;
        while (true) {
          pos += 1.0 + std::floor(std::log(rng.UniformOpen()) / log_skip);
          if (pos >= static_cast<double>(n)) break;
          out.push_back(static_cast<int64_t>(pos));
        }
      }
      break;
    }
  }
  return out;
}

std::vector<int64_t> Subsample(const SubsamplingSpec& sub, uint64_t seed) {
  Rng rng(seed);
  return Subsample(sub, rng);
}

absl::StatusOr<CapEstimate> CapsFromCounts(std::span<const int64_t> counts,
                                           int64_t batch, double delta_t,
                                           double gamma_t) {
  if (counts.size() < 2) {
    return absl::InvalidArgumentError("Monte-Carlo caps need M >= 2");
  }
  if (batch < 1) return absl::InvalidArgumentError("batch must be >= 1");
  if (!(delta_t > 0.0 && delta_t < 1.0) || !(gamma_t > 0.0 && gamma_t < 1.0)) {
    return absl::InvalidArgumentError("delta_t and gamma_t must lie in (0,1)");
  }
  std::vector<int64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() > batch) {
    return absl::InvalidArgumentError("discrepancy count outside [0, B]");
  }
  const double M = static_cast<double>(sorted.size());
  const double B = static_cast<double>(batch);
  const double band = std::sqrt(std::log(2.0 / gamma_t) / (2.0 * M));

  double mu2 = 0.0;
  for (int64_t k : sorted) mu2 += static_cast<double>(k) * static_cast<double>(k);
  mu2 /= M;

  CapEstimate est;
  est.batch = batch;
  est.delta = delta_t;
  est.gamma = gamma_t;
  est.method = CapMethod::kMonteCarlo;
  // E[K^2] <= B^2 always, so the cap saturates there.
  est.ms_cap = std::min(mu2 + B * B * band, B * B);
  if (delta_t > band) {
    const double level = 1.0 - (delta_t - band);
    auto rank = static_cast<size_t>(std::ceil(level * M));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    est.tail_cap = static_cast<double>(sorted[rank - 1]);
  } else {
    est.tail_cap = B;
  }
  return est;
}

absl::StatusOr<McCapSample> McCapCounts(const PairedSampler& sampler,
                                        const SubsamplingSpec& sub, int64_t M,
                                        uint64_t seed) {
  if (M < 2) return absl::InvalidArgumentError("Monte-Carlo caps need M >= 2");
  std::vector<int64_t> counts(static_cast<size_t>(M));
  std::vector<absl::Status> status(static_cast<size_t>(M));
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < M; ++r) {
    auto k = internal::McReplicate(sampler, sub, seed, r);
    if (k.ok()) {
      counts[static_cast<size_t>(r)] = *k;
    } else {
      status[static_cast<size_t>(r)] = k.status();
    }
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  std::sort(counts.begin(), counts.end());
  return McCapSample{std::move(counts), sub.MaxBatch()};
}

absl::StatusOr<CapEstimate> McCaps(const PairedSampler& sampler,
                                   const SubsamplingSpec& sub, int64_t M,
                                   double delta_t, double gamma_t,
                                   uint64_t seed) {
  auto sample = McCapCounts(sampler, sub, M, seed);
  if (!sample.ok()) return sample.status();
  return CapsFromCounts(sample->counts, sample->batch, delta_t, gamma_t);
}

CapEstimate CapsFromTv(double tau, int64_t batch, double delta_t) {
  const double B = static_cast<double>(batch);
  CapEstimate est;
  est.batch = batch;
  est.delta = delta_t;
  est.gamma = 0.0;
  est.method = CapMethod::kBinomialTv;
  est.ms_cap = B * tau * (1.0 - tau) + (B * tau) * (B * tau);
  est.tail_cap =
      std::clamp(B * tau + std::sqrt(B / 2.0 * std::log(1.0 / delta_t)), 0.0, B);
  return est;
}

absl::StatusOr<KMoments> HypergeometricK2(int64_t population,
                                          int64_t differing, int64_t batch) {
  if (population < 1 || differing < 0 || differing > population || batch < 1 ||
      batch > population) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hypergeometric parameters out of range: n=", population,
        " differing=", differing, " B=", batch));
  }
  const double n = static_cast<double>(population);
  const double p = static_cast<double>(differing) / n;
  const double B = static_cast<double>(batch);
  KMoments k;
  k.mean = B * p;
  k.variance = population == 1 ? 0.0 : B * p * (1.0 - p) * (n - B) / (n - 1.0);
  k.second_moment = k.variance + k.mean * k.mean;
  return k;
}

KMoments BinomialK2(int64_t population, int64_t differing, int64_t batch) {
  const double p = static_cast<double>(differing) / static_cast<double>(population);
  const double B = static_cast<double>(batch);
  KMoments k;
  k.mean = B * p;
  k.variance = B * p * (1.0 - p);
  k.second_moment = k.variance + k.mean * k.mean;
  return k;
}

CapEstimate LocalizedCap(int64_t d_max, int64_t batch) {
  const double k = static_cast<double>(std::min(d_max, batch));
  CapEstimate est;
  est.batch = batch;
  est.tail_cap = k;
  est.ms_cap = k * k;
  est.delta = 0.0;
  est.gamma = 0.0;
  est.method = CapMethod::kLocalized;
  return est;
}

absl::StatusOr<CapEstimate> UnionCaps(std::span<const McCapSample> per_instance,
                                      double gamma_total, double delta_t) {
  if (per_instance.empty()) {
    return absl::InvalidArgumentError("union bound over an empty instance list");
  }
  const int64_t batch = per_instance.front().batch;
  const size_t M = per_instance.front().counts.size();
  const double gamma = gamma_total / static_cast<double>(per_instance.size());
  CapEstimate out;
  out.batch = batch;
  out.delta = delta_t;
  out.gamma = gamma_total;
  out.method = CapMethod::kUnion;
  for (const McCapSample& inst : per_instance) {
    if (inst.batch != batch || inst.counts.size() != M) {
      return absl::InvalidArgumentError("union instances must share B and M");
    }
    auto est = CapsFromCounts(inst.counts, batch, delta_t, gamma);
    if (!est.ok()) return est.status();
    out.tail_cap = std::max(out.tail_cap, est->tail_cap);
    out.ms_cap = std::max(out.ms_cap, est->ms_cap);
  }
  return out;
}

double ResidualConfidence(std::span<const double> deltas,
                          std::span<const double> gammas) {
  double r = 1.0;
  for (double d : deltas) r -= d;
  for (double g : gammas) r -= g;
  return r;
}

}  // namespace srpp
