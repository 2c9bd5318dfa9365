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

#include "srpp/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace srpp {

absl::StatusOr<AttackSpec> AttackSpec::Create(Matrix group_means,
                                              std::vector<double> prior,
                                              double sigma2) {
  if (prior.empty() || prior.size() != group_means.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "prior has ", prior.size(), " entries for ", group_means.rows(),
        " group means"));
  }
  double sum = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) return absl::InvalidArgumentError("negative prior mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(absl::StrCat("prior sums to ", sum));
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    return absl::InvalidArgumentError("sigma2 must be positive and finite");
  }
  return AttackSpec(std::move(group_means), std::move(prior), sigma2);
}

double AttackSpec::MaxPrior() const {
  return *std::max_element(prior_.begin(), prior_.end());
}

std::vector<double> MapScores(std::span<const double> output,
                              const AttackSpec& spec) {
  std::vector<double> scores(spec.num_secrets());
  for (size_t s = 0; s < scores.size(); ++s) {
    if (spec.prior()[s] <= 0.0) {
      scores[s] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const auto mu = spec.group_means().row(s);
    double sq = 0.0;
    for (size_t j = 0; j < mu.size(); ++j) {
      const double diff = output[j] - mu[j];
      sq += diff * diff;
    }
    scores[s] = std::log(spec.prior()[s]) - sq / (2.0 * spec.sigma2());
  }
  return scores;
}

absl::StatusOr<std::vector<int32_t>> MapAttack(const Matrix& outputs,
                                               const AttackSpec& spec) {
  if (outputs.rows() > 0 && outputs.cols() != spec.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "outputs have dimension ", outputs.cols(), ", means ", spec.dim()));
  }
  std::vector<int32_t> out(outputs.rows());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(outputs.rows()); ++i) {
    const std::vector<double> scores =
        MapScores(outputs.row(static_cast<size_t>(i)), spec);
    // max_element keeps the first maximum.
    out[static_cast<size_t>(i)] = static_cast<int32_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
  }
  return out;
}

absl::StatusOr<AuditReport> AttackMetrics(std::span<const int32_t> predictions,
                                          std::span<const int32_t> truth,
                                          std::span<const double> prior) {
  if (predictions.empty() || prior.empty()) {
    return absl::InvalidArgumentError("empty predictions or prior");
  }
  if (predictions.size() != truth.size()) {
    return absl::InvalidArgumentError("predictions and truth differ in length");
  }
  size_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    correct += predictions[i] == truth[i];
  }
  AuditReport r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
  r.advantage = r.accuracy - *std::max_element(prior.begin(), prior.end());
  return r;
}

absl::StatusOr<double> LossThresholdMiaAuc(
    std::span<const double> member_losses,
    std::span<const double> nonmember_losses) {
  if (member_losses.empty() || nonmember_losses.empty()) {
    return absl::InvalidArgumentError("need member and non-member losses");
  }
  // Sorting both sides makes the exact count O(n log n).
  std::vector<double> m(member_losses.begin(), member_losses.end());
  std::vector<double> nm(nonmember_losses.begin(), nonmember_losses.end());
  std::sort(m.begin(), m.end());
  std::sort(nm.begin(), nm.end());
  double wins = 0.0;
  for (double x : m) {
    const auto lo = std::lower_bound(nm.begin(), nm.end(), x);
    const auto hi = std::upper_bound(lo, nm.end(), x);
    wins += static_cast<double>(nm.end() - hi) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(m.size()) * static_cast<double>(nm.size()));
}

absl::StatusOr<UtilityMetrics> Utility(const Matrix& released,
                                       const Matrix& truth) {
  if (released.rows() != truth.rows() || released.cols() != truth.cols()) {
    return absl::InvalidArgumentError("released and true outputs differ in shape");
  }
  if (released.rows() == 0 || released.cols() == 0) {
    return absl::InvalidArgumentError("no outputs to compare");
  }
  UtilityMetrics u;
  const double d = static_cast<double>(released.cols());
  for (size_t i = 0; i < released.rows(); ++i) {
    double sq = 0.0;
    double ab = 0.0;
    for (size_t j = 0; j < released.cols(); ++j) {
      const double diff = released(i, j) - truth(i, j);
      sq += diff * diff;
      ab += std::abs(diff);
    }
    u.mse += sq / d;
    u.mae += ab / d;
    u.mean_l2 += std::sqrt(sq);
  }
  const double n = static_cast<double>(released.rows());
  u.mse /= n;
  u.mae /= n;
  u.mean_l2 /= n;
  return u;
}

int MonotoneSteps(std::span<const double> series, bool increasing) {
  int ok = 0;
  for (size_t i = 1; i < series.size(); ++i) {
    ok += increasing ? series[i] >= series[i - 1] : series[i] <= series[i - 1];
  }
  return ok;
}

bool TrendHolds(std::span<const double> series, bool increasing, int required) {
  const int steps = series.size() < 2 ? 0 : static_cast<int>(series.size()) - 1;
  return MonotoneSteps(series, increasing) >= std::min(required, steps);
}

}  // namespace srpp
