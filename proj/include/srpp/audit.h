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

// Inference attacks against privatized outputs, and the utility metrics
// reported next to them.

#ifndef SRPP_AUDIT_H_
#define SRPP_AUDIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/matrix.h"

namespace srpp {

// Attacker knowledge: per-secret output means, prior, and noise variance.
class AttackSpec {
 public:
  static absl::StatusOr<AttackSpec> Create(Matrix group_means,
                                           std::vector<double> prior,
                                           double sigma2);

  const Matrix& group_means() const { return group_means_; }
  const std::vector<double>& prior() const { return prior_; }
  double sigma2() const { return sigma2_; }
  size_t num_secrets() const { return prior_.size(); }
  size_t dim() const { return group_means_.cols(); }
  double MaxPrior() const;

 private:
  AttackSpec(Matrix means, std::vector<double> prior, double sigma2)
      : group_means_(std::move(means)), prior_(std::move(prior)), sigma2_(sigma2) {}

  Matrix group_means_;
  std::vector<double> prior_;
  double sigma2_;
};

// log pi(s) - |y - mu_s|^2 / (2 sigma2); -inf for zero-prior secrets.
std::vector<double> MapScores(std::span<const double> output,
                              const AttackSpec& spec);

// Argmax of MapScores per row; ties go to the smaller index.
absl::StatusOr<std::vector<int32_t>> MapAttack(const Matrix& outputs,
                                               const AttackSpec& spec);

struct AuditReport {
  double accuracy = 0.0;
  double advantage = 0.0;
  std::optional<double> auc;
};

absl::StatusOr<AuditReport> AttackMetrics(std::span<const int32_t> predictions,
                                          std::span<const int32_t> truth,
                                          std::span<const double> prior);

// AUC of -loss for members against non-members, exact pair counting.
absl::StatusOr<double> LossThresholdMiaAuc(std::span<const double> member_losses,
                                           std::span<const double> nonmember_losses);

struct UtilityMetrics {
  double mse = 0.0;      // mean over rows of |y - x|^2 / d
  double mae = 0.0;      // mean absolute coordinate error
  double mean_l2 = 0.0;  // mean over rows of |y - x|
};

absl::StatusOr<UtilityMetrics> Utility(const Matrix& released,
                                       const Matrix& truth);

// Count of consecutive steps in `series` that move in the wanted direction
// (ties count as success).
int MonotoneSteps(std::span<const double> series, bool increasing);

// True when MonotoneSteps reaches min(required, steps available).
bool TrendHolds(std::span<const double> series, bool increasing, int required);

}  // namespace srpp

#endif  // SRPP_AUDIT_H_
