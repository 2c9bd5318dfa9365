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

#ifndef SRPP_SENSITIVITY_H_
#define SRPP_SENSITIVITY_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/scenario.h"

namespace srpp {

enum class SensitivityMode { kExact, kDkw };

struct SensitivityOptions {
  SensitivityMode mode = SensitivityMode::kExact;
  // Per-estimate failure probability in dkw mode. With `joint_union` set it
  // is read as the global gamma instead, and each of the M*m estimates runs
  // at (gamma/2)/(M*m) so the whole profile holds jointly w.p. 1 - gamma/2.
  double rho = 0.0;
  bool joint_union = false;
  // A.s. upper bound on every per-slice sensitivity; 0 means unknown.
  double delta0 = 0.0;
};

// Per-direction infinity-Wasserstein sensitivities and their aggregates.
struct SensitivityProfile {
  std::vector<double> per_slice;
  std::vector<double> weights;
  bool iid_sampled = false;
  SensitivityMode mode = SensitivityMode::kExact;
  // Per-estimate rho actually used (dkw mode only).
  std::optional<double> rho;
  double delta0 = 0.0;
  double mean_square = 0.0;  // sum_l w_l * per_slice_l^2
  double worst = 0.0;        // max_l per_slice_l^2

  size_t size() const { return per_slice.size(); }
};

// Fills the aggregates. Values above a positive delta0 are clamped to it.
absl::StatusOr<SensitivityProfile> MakeSensitivityProfile(
    std::vector<double> per_slice, std::vector<double> weights,
    bool iid_sampled, double delta0,
    SensitivityMode mode = SensitivityMode::kExact,
    std::optional<double> rho = std::nullopt);

// Max over scenario instances of the 1-D W_inf (exact, or the DKW upper bound
// at per-instance level `rho`) between the projected samples of the two worlds.
absl::StatusOr<double> PerSliceSensitivity(const ScenarioDataset& data,
                                           std::span<const double> direction,
                                           SensitivityMode mode,
                                           std::optional<double> rho = std::nullopt);

// OpenMP over directions; each direction projects and sorts every world once.
// Results are bitwise identical to reference::BuildProfileSerial.
absl::StatusOr<SensitivityProfile> BuildProfile(const ScenarioDataset& data,
                                                const SliceProfile& profile,
                                                const SensitivityOptions& options);

// Upper confidence bound on the profile mean-square sensitivity:
//   (1/m) sum_l per_slice_l^2 + delta0^2 sqrt(log(4/gamma) / (2m))
// for Monte-Carlo profiles; the weighted mean alone for finite profiles.
absl::StatusOr<double> AveUcb(const SensitivityProfile& profile, double gamma,
                              size_t m);

// Unsliced Wasserstein sensitivity via bottleneck matching, max over instances.
inline constexpr size_t kMaxOracleSamples = 64;
absl::StatusOr<double> FullSensitivityOracle(const ScenarioDataset& data);

// The per-instance rho implied by `options` for a profile of m directions.
absl::StatusOr<std::optional<double>> EffectiveRho(const ScenarioDataset& data,
                                                   size_t m,
                                                   const SensitivityOptions& options);

namespace reference {

// Serial twin of BuildProfile, one PerSliceSensitivity call per direction.
absl::StatusOr<SensitivityProfile> BuildProfileSerial(
    const ScenarioDataset& data, const SliceProfile& profile,
    const SensitivityOptions& options);

}  // namespace reference
}  // namespace srpp

#endif  // SRPP_SENSITIVITY_H_
