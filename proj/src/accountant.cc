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

#include "srpp/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace srpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double BlockwiseNormSum(std::span<const LayerBlock> blocks,
                        std::span<const double> direction) {
  double total = 0.0;
  size_t offset = 0;
  for (const LayerBlock& b : blocks) {
    const double norm = Norm2(direction.subspan(offset, b.size));
    total += b.clip * b.lipschitz * norm;
    offset += b.size;
  }
  return total;
}

size_t BlocksDim(std::span<const LayerBlock> blocks) {
  size_t d = 0;
  for (const LayerBlock& b : blocks) d += b.size;
  return d;
}

}  // namespace

absl::Status SgdHyper::Validate(size_t model_dim) const {
  if (iterations < 1) return absl::InvalidArgumentError("iterations must be >= 1");
  if (!(clip > 0.0)) return absl::InvalidArgumentError("clip C must be > 0");
  auto sized = [&](size_t n) {
    return n == 1 || n == static_cast<size_t>(iterations);
  };
  if (!sized(batch.size())) {
    return absl::InvalidArgumentError("batch schedule must have length 1 or T");
  }
  for (int64_t b : batch) {
    if (b < 1) return absl::InvalidArgumentError("every batch size must be >= 1");
  }
  if (slice_lipschitz.empty()) {
    if (!sized(lipschitz.size())) {
      return absl::InvalidArgumentError("Lipschitz schedule must have length 1 or T");
    }
    for (double l : lipschitz) {
      if (!(l >= 0.0)) return absl::InvalidArgumentError("Lipschitz constants must be >= 0");
    }
  } else {
    if (!sized(slice_lipschitz.size())) {
      return absl::InvalidArgumentError(
          "slice Lipschitz schedule must have length 1 or T");
    }
    for (const auto& row : slice_lipschitz) {
      for (double l : row) {
        if (!(l >= 0.0)) return absl::InvalidArgumentError("Lipschitz constants must be >= 0");
      }
    }
  }
  if (!blocks.empty()) {
    for (const LayerBlock& b : blocks) {
      if (b.size == 0 || !(b.clip > 0.0) || !(b.lipschitz >= 0.0)) {
        return absl::InvalidArgumentError("invalid layer block");
      }
    }
    if (model_dim != 0 && BlocksDim(blocks) != model_dim) {
      return absl::InvalidArgumentError(absl::StrCat(
          "block sizes sum to ", BlocksDim(blocks), ", model has ", model_dim));
    }
  }
  return absl::OkStatus();
}

int64_t SgdHyper::BatchAt(int t) const {
  return batch.size() == 1 ? batch[0] : batch[static_cast<size_t>(t)];
}

double SgdHyper::LipschitzAt(int t) const {
  return lipschitz.size() == 1 ? lipschitz[0] : lipschitz[static_cast<size_t>(t)];
}

std::string_view AccountingModeName(AccountingMode mode) {
  switch (mode) {
    case AccountingMode::kAve:
      return "ave";
    case AccountingMode::kJoint:
      return "joint";
    case AccountingMode::kSaAve:
      return "sa_ave";
    case AccountingMode::kSaJoint:
      return "sa_joint";
  }
  return "unknown";
}

absl::StatusOr<AccountingMode> ParseAccountingMode(std::string_view name) {
  for (AccountingMode m : {AccountingMode::kAve, AccountingMode::kJoint,
                           AccountingMode::kSaAve, AccountingMode::kSaJoint}) {
    if (AccountingModeName(m) == name) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown accounting mode '",
                                                 std::string(name), "'"));
}

bool IsSubsamplingAware(AccountingMode mode) {
  return mode == AccountingMode::kSaAve || mode == AccountingMode::kSaJoint;
}

bool IsJoint(AccountingMode mode) {
  return mode == AccountingMode::kJoint || mode == AccountingMode::kSaJoint;
}

std::vector<double> HucFromCap(double cap, int64_t batch, double clip,
                               std::span<const double> lipschitz) {
  std::vector<double> h;
  h.reserve(lipschitz.size());
  const double B = static_cast<double>(batch);
  for (double l : lipschitz) {
    const double shift = 2.0 * cap * l * clip / B;
    h.push_back(shift * shift);
  }
  return h;
}

std::vector<double> SaHucFromK2(double k2, int64_t batch, double clip,
                                std::span<const double> lipschitz) {
  std::vector<double> h;
  h.reserve(lipschitz.size());
  const double B = static_cast<double>(batch);
  for (double l : lipschitz) {
    const double unit = 2.0 * l * clip / B;
    h.push_back(unit * unit * k2);
  }
  return h;
}

absl::StatusOr<double> HucBlockwiseMinimal(double cap, int64_t batch,
                                           std::span<const BlockScale> blocks,
                                           std::span<const double> direction) {
  size_t dim = 0;
  for (const BlockScale& b : blocks) dim += b.size;
  if (blocks.empty() || dim != direction.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "block partition covers ", dim, " coordinates, direction has ",
        direction.size()));
  }
  double sum = 0.0;
  size_t offset = 0;
  for (const BlockScale& b : blocks) {
    // A_t^T u restricted to block b is scale_b * P_b u.
    sum += b.clip * std::abs(b.scale) * Norm2(direction.subspan(offset, b.size));
    offset += b.size;
  }
  const double lead = 2.0 * cap / static_cast<double>(batch);
  return lead * lead * sum * sum;
}

absl::StatusOr<double> PerLayerCaps(const CapEstimate& cap, const SgdHyper& hyper,
                                    std::span<const double> direction,
                                    CapKind kind, int t) {
  if (hyper.blocks.empty()) {
    return absl::InvalidArgumentError("per-layer caps need hyper.blocks");
  }
  if (BlocksDim(hyper.blocks) != direction.size()) {
    return absl::InvalidArgumentError("block sizes do not match direction dimension");
  }
  const double sum = BlockwiseNormSum(hyper.blocks, direction);
  const double B = static_cast<double>(hyper.BatchAt(t));
  const double k2 =
      kind == CapKind::kWorst ? cap.tail_cap * cap.tail_cap : cap.ms_cap;
  return 4.0 / (B * B) * k2 * sum * sum;
}

double PerIterationCost(double h, double sigma2, double alpha) {
  if (h == 0.0) return 0.0;
  if (sigma2 == 0.0) return kInf;
  return alpha / 2.0 * h / sigma2;
}

std::vector<double> PerIterationCost(std::span<const double> h,
                                     std::span<const double> variances,
                                     double alpha) {
  std::vector<double> out;
  out.reserve(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    out.push_back(PerIterationCost(h[i], variances[i], alpha));
  }
  return out;
}

absl::Status HucLedger::Validate() const {
  if (caps.empty()) return absl::InvalidArgumentError("ledger has no iterations");
  for (const auto& row : caps) {
    if (row.size() != weights.size()) {
      return absl::InvalidArgumentError("ledger row length differs from profile size");
    }
    for (double h : row) {
      if (!(h >= 0.0)) return absl::InvalidArgumentError("ledger caps must be >= 0");
    }
  }
  return absl::OkStatus();
}

double HucLedger::Aggregate() const {
  double total = 0.0;
  for (const auto& row : caps) {
    if (IsJoint(mode)) {
      total += *std::max_element(row.begin(), row.end());
    } else {
      double s = 0.0;
      for (size_t l = 0; l < row.size(); ++l) s += weights[l] * row[l];
      total += s;
    }
  }
  return total;
}

absl::StatusOr<HucLedger> BuildLedger(const SgdHyper& hyper,
                                      std::span<const double> per_iteration_cap,
                                      const SliceProfile& profile,
                                      AccountingMode mode) {
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;
  const size_t T = static_cast<size_t>(hyper.iterations);
  if (per_iteration_cap.size() != 1 && per_iteration_cap.size() != T) {
    return absl::InvalidArgumentError("per-iteration caps must have length 1 or T");
  }
  if (!hyper.blocks.empty() && BlocksDim(hyper.blocks) != profile.dim()) {
    return absl::InvalidArgumentError("block sizes do not match profile dimension");
  }
  const size_t m = profile.size();
  HucLedger ledger;
  ledger.mode = mode;
  ledger.weights.assign(profile.weights().begin(), profile.weights().end());
  ledger.caps.reserve(T);
  for (size_t t = 0; t < T; ++t) {
    const double cap =
        per_iteration_cap.size() == 1 ? per_iteration_cap[0] : per_iteration_cap[t];
    if (!(cap >= 0.0)) return absl::InvalidArgumentError("caps must be >= 0");
    const double k2 = IsSubsamplingAware(mode) ? cap : cap * cap;
    const int64_t B = hyper.BatchAt(static_cast<int>(t));
    std::vector<double> row;
    if (!hyper.blocks.empty()) {
      row.reserve(m);
      const double lead = 4.0 / (static_cast<double>(B) * static_cast<double>(B));
      for (size_t l = 0; l < m; ++l) {
        const double s = BlockwiseNormSum(hyper.blocks, profile.direction(l));
        row.push_back(lead * k2 * s * s);
      }
    } else {
      std::vector<double> lip;
      if (!hyper.slice_lipschitz.empty()) {
        lip = hyper.slice_lipschitz.size() == 1 ? hyper.slice_lipschitz[0]
                                                : hyper.slice_lipschitz[t];
        if (lip.size() != m) {
          return absl::InvalidArgumentError(
              "slice Lipschitz vector length differs from profile size");
        }
      } else {
        lip.assign(m, hyper.LipschitzAt(static_cast<int>(t)));
      }
      row = IsSubsamplingAware(mode) ? SaHucFromK2(k2, B, hyper.clip, lip)
                                     : HucFromCap(cap, B, hyper.clip, lip);
    }
    ledger.caps.push_back(std::move(row));
  }
  return ledger;
}

absl::StatusOr<NoiseSpec> SigmaForBudget(const HucLedger& ledger, double alpha,
                                         double epsilon) {
  if (absl::Status s = ledger.Validate(); !s.ok()) return s;
  if (!(alpha > 1.0) || !(epsilon > 0.0)) {
    return absl::InvalidArgumentError("need alpha > 1 and epsilon > 0");
  }
  return NoiseSpec{alpha / (2.0 * epsilon) * ledger.Aggregate(), 0};
}

absl::StatusOr<double> BudgetForSigma(const HucLedger& ledger, double alpha,
                                      double sigma2) {
  if (absl::Status s = ledger.Validate(); !s.ok()) return s;
  if (!(alpha > 1.0) || !(sigma2 >= 0.0)) {
    return absl::InvalidArgumentError("need alpha > 1 and sigma2 >= 0");
  }
  const double total = ledger.Aggregate();
  if (total == 0.0) return 0.0;
  if (sigma2 == 0.0) return kInf;
  return alpha / (2.0 * sigma2) * total;
}

absl::StatusOr<BudgetReport> Compose(std::span<const MechanismBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("nothing to compose");
  }
  BudgetReport r;
  r.alpha = budgets.front().alpha;
  r.mode = budgets.front().mode;
  for (const MechanismBudget& b : budgets) {
    if (b.alpha != r.alpha) {
      return absl::InvalidArgumentError("composition needs a common Renyi order");
    }
    if (b.mode != r.mode) {
      return absl::InvalidArgumentError("composition needs a common SRPP mode");
    }
    if (!(b.epsilon >= 0.0)) {
      return absl::InvalidArgumentError("budgets must be nonnegative");
    }
    r.epsilons.push_back(b.epsilon);
  }
  // Summing in sorted order makes the total independent of input order.
  std::vector<double> sorted = r.epsilons;
  std::sort(sorted.begin(), sorted.end());
  for (double e : sorted) r.total += e;
  return r;
}

}  // namespace srpp
