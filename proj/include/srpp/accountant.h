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

// History-uniform caps (HUC) and their subsampling-aware variant for clipped
// noisy SGD, the per-iteration Gaussian sliced Renyi cost they induce, noise
// calibration over a whole run, and additive composition.
//
// Update maps are restricted to (blockwise) scaled-linear steps
// xi_t = xi_{t-1} - A_t g with diagonal A_t. Users certify the slice-wise
// Lipschitz constants L_{t,i}; for plain SGD, L_t is the step size.

#ifndef SRPP_ACCOUNTANT_H_
#define SRPP_ACCOUNTANT_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/calibrate.h"
#include "srpp/caps.h"
#include "srpp/scenario.h"

namespace srpp {

struct LayerBlock {
  size_t size = 0;         // parameters in the block
  double clip = 0.0;       // per-block clipping radius C_b
  double lipschitz = 1.0;  // block scale (e.g. per-block step size)
};

struct SgdHyper {
  int iterations = 0;
  double clip = 1.0;
  // Length 1 (constant) or `iterations`.
  std::vector<int64_t> batch;
  // Global per-iteration Lipschitz constant L_t, length 1 or `iterations`.
  std::vector<double> lipschitz;
  // Optional per-iteration slice-wise constants L_{t,i}; overrides `lipschitz`.
  std::vector<std::vector<double>> slice_lipschitz;
  std::vector<LayerBlock> blocks;

  absl::Status Validate(size_t model_dim = 0) const;
  int64_t BatchAt(int t) const;
  double LipschitzAt(int t) const;
};

enum class AccountingMode { kAve, kJoint, kSaAve, kSaJoint };

std::string_view AccountingModeName(AccountingMode mode);
absl::StatusOr<AccountingMode> ParseAccountingMode(std::string_view name);
bool IsSubsamplingAware(AccountingMode mode);
bool IsJoint(AccountingMode mode);

// h_i = (2 K L_i C / B)^2.
std::vector<double> HucFromCap(double cap, int64_t batch, double clip,
                               std::span<const double> lipschitz);
// h_i = (2 L_i C / B)^2 * k2.
std::vector<double> SaHucFromK2(double k2, int64_t batch, double clip,
                                std::span<const double> lipschitz);

struct BlockScale {
  size_t size = 0;
  double clip = 0.0;
  double scale = 1.0;
};
// (2K/B)^2 (sum_b C_b ||scale_b * P_b u||)^2 for a blockwise-diagonal update.
absl::StatusOr<double> HucBlockwiseMinimal(double cap, int64_t batch,
                                           std::span<const BlockScale> blocks,
                                           std::span<const double> direction);

enum class CapKind { kWorst, kMeanSquare };

// Per-layer clipping cap for one direction at iteration t, using the blocks
// of `hyper`: worst uses tail_cap^2, mean-square uses ms_cap.
absl::StatusOr<double> PerLayerCaps(const CapEstimate& cap, const SgdHyper& hyper,
                                    std::span<const double> direction,
                                    CapKind kind, int t = 0);

// (alpha/2) h / v; +infinity for v == 0 with h > 0.
double PerIterationCost(double h, double sigma2, double alpha);
// Per-slice variances v_i = u_i^T Sigma u_i for anisotropic noise.
std::vector<double> PerIterationCost(std::span<const double> h,
                                     std::span<const double> variances,
                                     double alpha);

// T per-iteration cap vectors over the slices of one profile.
struct HucLedger {
  AccountingMode mode = AccountingMode::kAve;
  std::vector<std::vector<double>> caps;
  std::vector<double> weights;
  double noise_variance = 0.0;

  absl::Status Validate() const;
  // sum_t sum_l w_l h_{t,l} (ave) or sum_t max_l h_{t,l} (joint).
  double Aggregate() const;
};

// Ledger for a run with one cap (K or E[K^2]) per iteration.
absl::StatusOr<HucLedger> BuildLedger(const SgdHyper& hyper,
                                      std::span<const double> per_iteration_cap,
                                      const SliceProfile& profile,
                                      AccountingMode mode);

// sigma2 = alpha/(2 eps) * ledger aggregate.
absl::StatusOr<NoiseSpec> SigmaForBudget(const HucLedger& ledger, double alpha,
                                         double epsilon);
// eps = alpha/(2 sigma2) * ledger aggregate; +infinity when sigma2 == 0 and
// the aggregate is positive.
absl::StatusOr<double> BudgetForSigma(const HucLedger& ledger, double alpha,
                                      double sigma2);

struct MechanismBudget {
  double alpha = 2.0;
  double epsilon = 0.0;
  AccountingMode mode = AccountingMode::kAve;
};

struct BudgetReport {
  double alpha = 0.0;
  AccountingMode mode = AccountingMode::kAve;
  std::vector<double> epsilons;
  double total = 0.0;
  // 1 - sum(delta_t) - sum(gamma_t) when caps were estimated.
  std::optional<double> residual_confidence;
};

// Additive composition; all entries must share alpha and mode.
absl::StatusOr<BudgetReport> Compose(std::span<const MechanismBudget> budgets);

}  // namespace srpp

#endif  // SRPP_ACCOUNTANT_H_
