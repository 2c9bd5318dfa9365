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

#include "srpp/sensitivity.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "sensitivity_internal.h"
#include "srpp/ot1d.h"

namespace srpp {
namespace internal {

absl::StatusOr<double> InstanceDistance(std::span<const double> a,
                                        std::span<const double> b,
                                        SensitivityMode mode,
                                        std::optional<double> rho) {
  if (mode == SensitivityMode::kExact) {
    if (a.size() != b.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unequal sample sizes ", a.size(), " and ", b.size(),
          " in exact mode"));
    }
    return WInfSortedGap(a, b);
  }
  if (!rho.has_value() || !(*rho > 0.0 && *rho < 1.0)) {
    return absl::InvalidArgumentError("dkw mode needs rho in (0,1)");
  }
  if (a.size() < 2 || b.size() < 2) {
    return absl::InvalidArgumentError("dkw mode needs n >= 2 per world");
  }
  const double band_a = DkwBand(*rho / 2.0, a.size());
  const double band_b = DkwBand(*rho / 2.0, b.size());
  if (std::max(band_a, band_b) >= 0.5) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible confidence: DKW band ", std::max(band_a, band_b),
        " >= 1/2 at rho = ", *rho));
  }
  return DkwSup(a, b, band_a, band_b);
}

absl::Status AnnotateInstance(const absl::Status& s,
                              const ScenarioInstance& inst) {
  return absl::Status(s.code(),
                      absl::StrCat("instance (", inst.prior_id, ", ",
                                   inst.pair.first, "->", inst.pair.second,
                                   "): ", s.message()));
}

absl::Status ValidateDirection(const ScenarioDataset& data,
                               std::span<const double> direction) {
  if (direction.size() != data.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("direction has dimension ", direction.size(),
                     ", scenario has ", data.dim()));
  }
  if (std::abs(Norm2(direction) - 1.0) > 1e-9) {
    return absl::InvalidArgumentError("direction is not unit norm");
  }
  return absl::OkStatus();
}

}  // namespace internal

absl::StatusOr<SensitivityProfile> MakeSensitivityProfile(
    std::vector<double> per_slice, std::vector<double> weights,
    bool iid_sampled, double delta0, SensitivityMode mode,
    std::optional<double> rho) {
  if (per_slice.empty()) {
    return absl::InvalidArgumentError("sensitivity profile needs >= 1 direction");
  }
  if (weights.size() != per_slice.size()) {
    return absl::InvalidArgumentError("weights and per-slice values differ in length");
  }
  if (!(delta0 >= 0.0)) {
    return absl::InvalidArgumentError("delta0 must be nonnegative");
  }
  SensitivityProfile p;
  p.mean_square = 0.0;
  p.worst = 0.0;
  for (size_t l = 0; l < per_slice.size(); ++l) {
    double& v = per_slice[l];
    if (!(v >= 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("per-slice sensitivity must be finite and >= 0");
    }
    if (delta0 > 0.0) v = std::min(v, delta0);
    p.mean_square += weights[l] * v * v;
    p.worst = std::max(p.worst, v * v);
  }
  // Rounding in the weighted sum can exceed the max by an ulp.
  p.mean_square = std::min(p.mean_square, p.worst);
  p.per_slice = std::move(per_slice);
  p.weights = std::move(weights);
  p.iid_sampled = iid_sampled;
  p.delta0 = delta0;
  p.mode = mode;
  p.rho = mode == SensitivityMode::kDkw ? rho : std::nullopt;
  return p;
}

absl::StatusOr<double> PerSliceSensitivity(const ScenarioDataset& data,
                                           std::span<const double> direction,
                                           SensitivityMode mode,
                                           std::optional<double> rho) {
  if (absl::Status s = internal::ValidateDirection(data, direction); !s.ok()) {
    return s;
  }
  double best = 0.0;
  std::vector<double> a, b;
  for (const ScenarioInstance& inst : data.instances()) {
    ProjectInto(data.worlds()[inst.first_world].samples, direction, a);
    ProjectInto(data.worlds()[inst.second_world].samples, direction, b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto d = internal::InstanceDistance(a, b, mode, rho);
    if (!d.ok()) return internal::AnnotateInstance(d.status(), inst);
    best = std::max(best, *d);
  }
  return best;
}

absl::StatusOr<std::optional<double>> EffectiveRho(
    const ScenarioDataset& data, size_t m, const SensitivityOptions& options) {
  if (options.mode == SensitivityMode::kExact) return std::optional<double>();
  if (!(options.rho > 0.0 && options.rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("dkw mode needs rho in (0,1), got ", options.rho));
  }
  if (!options.joint_union) return std::optional<double>(options.rho);
  const double count = static_cast<double>(data.instances().size() * m);
  return std::optional<double>(options.rho / 2.0 / count);
}

absl::StatusOr<SensitivityProfile> BuildProfile(
    const ScenarioDataset& data, const SliceProfile& profile,
    const SensitivityOptions& options) {
  if (profile.size() == 0) {
    return absl::InvalidArgumentError("empty direction set");
  }
  if (profile.dim() != data.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "profile dimension ", profile.dim(), " != scenario dimension ", data.dim()));
  }
  auto rho = EffectiveRho(data, profile.size(), options);
  if (!rho.ok()) return rho.status();

  const auto m = static_cast<long>(profile.size());
  std::vector<double> per_slice(profile.size(), 0.0);
  std::vector<absl::Status> status(profile.size());
  const auto& worlds = data.worlds();
  const auto& instances = data.instances();

  // Directions go in chunks so each sample row is read once per chunk
  // rather than once per direction.
  constexpr long kChunk = 16;
  const long chunks = (m + kChunk - 1) / kChunk;
#pragma omp parallel
  {
    std::vector<std::vector<std::vector<double>>> projected(
        kChunk, std::vector<std::vector<double>>(worlds.size()));
#pragma omp for schedule(dynamic)
    for (long b = 0; b < chunks; ++b) {
      const long first = b * kChunk;
      const long count = std::min(kChunk, m - first);
      for (size_t w = 0; w < worlds.size(); ++w) {
        const Matrix& x = worlds[w].samples;
        for (long c = 0; c < count; ++c) projected[c][w].resize(x.rows());
        for (size_t k = 0; k < x.rows(); ++k) {
          const auto row = x.row(k);
          for (long c = 0; c < count; ++c) {
            projected[c][w][k] = Dot(row, profile.direction(static_cast<size_t>(first + c)));
          }
        }
      }
      for (long c = 0; c < count; ++c) {
        const long l = first + c;
        for (auto& v : projected[c]) std::sort(v.begin(), v.end());
        double best = 0.0;
        for (const ScenarioInstance& inst : instances) {
          auto d = internal::InstanceDistance(projected[c][inst.first_world],
                                              projected[c][inst.second_world],
                                              options.mode, *rho);
          if (!d.ok()) {
            status[l] = internal::AnnotateInstance(d.status(), inst);
            break;
          }
          best = std::max(best, *d);
        }
        per_slice[l] = best;
      }
    }
  }
  for (size_t l = 0; l < status.size(); ++l) {
    if (!status[l].ok()) {
      return absl::Status(status[l].code(), absl::StrCat("direction ", l, ": ",
                                                         status[l].message()));
    }
  }
  return MakeSensitivityProfile(std::move(per_slice),
                                std::vector<double>(profile.weights().begin(),
                                                    profile.weights().end()),
                                profile.iid_sampled(), options.delta0,
                                options.mode, *rho);
}

absl::StatusOr<double> AveUcb(const SensitivityProfile& profile, double gamma,
                              size_t m) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0,1), got ", gamma));
  }
  if (m == 0 || m != profile.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "m = ", m, " does not match profile size ", profile.size()));
  }
  if (!profile.iid_sampled) return profile.mean_square;
  if (!(profile.delta0 > 0.0)) {
    return absl::InvalidArgumentError(
        "missing bound: delta0 must be positive for the Monte-Carlo correction");
  }
  double sum = 0.0;
  for (double v : profile.per_slice) sum += v * v;
  const double md = static_cast<double>(m);
  return sum / md + profile.delta0 * profile.delta0 *
                        std::sqrt(std::log(4.0 / gamma) / (2.0 * md));
}

absl::StatusOr<double> FullSensitivityOracle(const ScenarioDataset& data) {
  double best = 0.0;
  for (const ScenarioInstance& inst : data.instances()) {
    const Matrix& x = data.worlds()[inst.first_world].samples;
    const Matrix& y = data.worlds()[inst.second_world].samples;
    if (x.rows() > kMaxOracleSamples || y.rows() > kMaxOracleSamples) {
      return internal::AnnotateInstance(
          absl::ResourceExhaustedError(absl::StrCat(
              "unsliced oracle limited to n <= ", kMaxOracleSamples)),
          inst);
    }
    auto d = WInfExactNd(x, y);
    if (!d.ok()) return internal::AnnotateInstance(d.status(), inst);
    best = std::max(best, *d);
  }
  return best;
}

}  // namespace srpp
