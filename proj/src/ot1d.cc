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

#include "srpp/ot1d.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace srpp {
namespace {

size_t QuantileIndex(double t, size_t n) {
  if (!(t > 0.0)) return 0;
  if (t >= 1.0) return n - 1;
  const double pos = std::ceil(t * static_cast<double>(n));
  const size_t k = static_cast<size_t>(pos);
  return k == 0 ? 0 : std::min(k, n) - 1;
}

double QuantileOf(std::span<const double> v, double t) {
  return v[QuantileIndex(t, v.size())];
}

absl::Status CheckEqualSizes(const Sorted1DSample& a, const Sorted1DSample& b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "unequal sample sizes ", a.size(), " and ", b.size()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Sorted1DSample> Sorted1DSample::FromUnsorted(
    std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return FromSorted(std::move(values));
}

absl::StatusOr<Sorted1DSample> Sorted1DSample::FromSorted(
    std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("empty 1-D sample");
  }
  for (size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      return absl::InvalidArgumentError("non-finite value in 1-D sample");
    }
    if (k > 0 && values[k] < values[k - 1]) {
      return absl::InvalidArgumentError("1-D sample is not sorted");
    }
  }
  return Sorted1DSample(std::move(values));
}

double Sorted1DSample::Quantile(double t) const {
  return QuantileOf(values_, t);
}

double DkwBand(double rho, size_t n) {
  return std::sqrt(std::log(2.0 / rho) / (2.0 * static_cast<double>(n)));
}

ConfidenceSpec::ConfidenceSpec(double rho, size_t n)
    : rho_(rho), n_(n), band_(DkwBand(rho, n)) {}

absl::StatusOr<ConfidenceSpec> ConfidenceSpec::Create(double rho, size_t n) {
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("confidence level rho must lie in (0,1), got ", rho));
  }
  if (n == 0) {
    return absl::InvalidArgumentError("sample size must be positive");
  }
  return ConfidenceSpec(rho, n);
}

absl::StatusOr<double> WInf1DExact(const Sorted1DSample& a,
                                   const Sorted1DSample& b) {
  if (absl::Status s = CheckEqualSizes(a, b); !s.ok()) return s;
  return internal::WInfSortedGap(a.values(), b.values());
}

absl::StatusOr<double> WP1D(const Sorted1DSample& a, const Sorted1DSample& b,
                            double p) {
  if (!(p >= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("order p must be >= 1, got ", p));
  }
  if (absl::Status s = CheckEqualSizes(a, b); !s.ok()) return s;
  if (std::isinf(p)) return internal::WInfSortedGap(a.values(), b.values());
  // Scale by the largest gap so large p does not underflow.
  const double top = internal::WInfSortedGap(a.values(), b.values());
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    acc += std::pow(std::abs(a[k] - b[k]) / top, p);
  }
  return top * std::pow(acc / static_cast<double>(a.size()), 1.0 / p);
}

absl::StatusOr<double> WInf1DDkw(const Sorted1DSample& a,
                                 const Sorted1DSample& b, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("confidence level rho must lie in (0,1), got ", rho));
  }
  if (a.size() < 2 || b.size() < 2) {
    return absl::InvalidArgumentError("DKW bound needs at least 2 samples per side");
  }
  const double band_a = DkwBand(rho / 2.0, a.size());
  const double band_b = DkwBand(rho / 2.0, b.size());
  if (std::max(band_a, band_b) >= 0.5) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible confidence: DKW band ", std::max(band_a, band_b),
        " >= 1/2 for n = ", std::min(a.size(), b.size()), ", rho = ", rho));
  }
  return internal::DkwSup(a.values(), b.values(), band_a, band_b);
}

namespace internal {

double WInfSortedGap(std::span<const double> a, std::span<const double> b) {
  double best = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    best = std::max(best, std::abs(a[k] - b[k]));
  }
  return best;
}

double DkwSup(std::span<const double> a, std::span<const double> b,
              double band_a, double band_b) {
  const double lo = std::max(band_a, band_b);
  const double hi = 1.0 - lo;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // Both band-shifted gaps are step functions of t; their jumps sit where a
  // shifted argument crosses k/n.
  std::vector<double> grid = {lo, hi};
  grid.reserve(2 * (a.size() + b.size()) + 2);
  auto add = [&](double t) {
    if (t > lo && t < hi) grid.push_back(t);
  };
  for (size_t k = 1; k <= a.size(); ++k) {
    add(static_cast<double>(k) / na - band_a);
    add(static_cast<double>(k) / na + band_a);
  }
  for (size_t k = 1; k <= b.size(); ++k) {
    add(static_cast<double>(k) / nb - band_b);
    add(static_cast<double>(k) / nb + band_b);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto gap = [&](double t) {
    const double up = std::abs(QuantileOf(a, t + band_a) - QuantileOf(b, t - band_b));
    const double down = std::abs(QuantileOf(b, t + band_b) - QuantileOf(a, t - band_a));
    return std::max(up, down);
  };
  double best = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    best = std::max(best, gap(grid[i]));
    if (i + 1 < grid.size()) {
      best = std::max(best, gap(0.5 * (grid[i] + grid[i + 1])));
    }
  }
  return best;
}

namespace {

bool Augment(std::span<const double> dist, size_t n, double threshold,
             size_t u, std::vector<char>& visited, std::vector<int>& match_right) {
  for (size_t j = 0; j < n; ++j) {
    if (visited[j] || dist[u * n + j] > threshold) continue;
    visited[j] = 1;
    if (match_right[j] < 0 ||
        Augment(dist, n, threshold, static_cast<size_t>(match_right[j]),
                visited, match_right)) {
      match_right[j] = static_cast<int>(u);
      return true;
    }
  }
  return false;
}

}  // namespace

bool HasPerfectMatching(std::span<const double> dist, size_t n,
                        double threshold) {
  // Kuhn's augmenting paths in fixed vertex order; depth is at most n.
  std::vector<int> match_right(n, -1);
  std::vector<char> visited(n);
  for (size_t u = 0; u < n; ++u) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!Augment(dist, n, threshold, u, visited, match_right)) return false;
  }
  return true;
}

}  // namespace internal

absl::StatusOr<double> WInfExactNd(const Matrix& x, const Matrix& y) {
  const size_t n = x.rows();
  if (n == 0 || y.rows() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bottleneck matching needs equal nonzero row counts, got ", n, " and ",
        y.rows()));
  }
  if (x.cols() != y.cols()) {
    return absl::InvalidArgumentError("point clouds differ in dimension");
  }
  if (n > kMaxBottleneckPoints) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "bottleneck oracle limited to ", kMaxBottleneckPoints, " points, got ", n));
  }
  std::vector<double> dist(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (x.cols() == 1) {
        dist[i * n + j] = std::abs(x(i, 0) - y(j, 0));
      } else {
        double s = 0.0;
        for (size_t c = 0; c < x.cols(); ++c) {
          const double diff = x(i, c) - y(j, c);
          s += diff * diff;
        }
        dist[i * n + j] = std::sqrt(s);
      }
    }
  }
  std::vector<double> levels(dist);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  // Feasibility is monotone in the threshold; the largest level always works.
  size_t lo = 0;
  size_t hi = levels.size() - 1;
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (internal::HasPerfectMatching(dist, n, levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return levels[lo];
}

}  // namespace srpp
