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

// One-dimensional optimal transport between empirical measures, plus a
// bottleneck-matching oracle for the full-dimensional infinity-Wasserstein
// distance on small point clouds.

#ifndef SRPP_OT1D_H_
#define SRPP_OT1D_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/matrix.h"

namespace srpp {

// Order statistics of a finite, nonempty 1-D sample.
class Sorted1DSample {
 public:
  // Sorts a copy of `values`; rejects empty or non-finite input.
  static absl::StatusOr<Sorted1DSample> FromUnsorted(std::vector<double> values);
  // Accepts already-sorted input; rejects decreasing runs.
  static absl::StatusOr<Sorted1DSample> FromSorted(std::vector<double> values);

  size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](size_t k) const { return values_[k]; }

  // Left-continuous generalized inverse of the empirical CDF,
  // inf{x : F(x) >= t}, with t clamped into (0, 1].
  double Quantile(double t) const;

 private:
  explicit Sorted1DSample(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// DKW band half-width e_n(rho) = sqrt(log(2/rho) / (2n)).
class ConfidenceSpec {
 public:
  static absl::StatusOr<ConfidenceSpec> Create(double rho, size_t n);

  double rho() const { return rho_; }
  size_t n() const { return n_; }
  double band() const { return band_; }

 private:
  ConfidenceSpec(double rho, size_t n);
  double rho_;
  size_t n_;
  double band_;
};

double DkwBand(double rho, size_t n);

// max_k |a_(k) - b_(k)|. Sizes must match.
absl::StatusOr<double> WInf1DExact(const Sorted1DSample& a,
                                   const Sorted1DSample& b);

// ((1/n) sum_k |a_(k) - b_(k)|^p)^(1/p) for p >= 1; sizes must match.
absl::StatusOr<double> WP1D(const Sorted1DSample& a, const Sorted1DSample& b,
                            double p);

// High-probability upper bound on the population W_inf between the laws that
// generated `a` and `b`. Each sample gets a DKW band at level rho/2; the sup
// of the band-shifted quantile gap is taken over t in [e, 1 - e], e the wider
// band, in both orientations. Returns FailedPrecondition when the band leaves
// no admissible t (e >= 1/2).
absl::StatusOr<double> WInf1DDkw(const Sorted1DSample& a,
                                 const Sorted1DSample& b, double rho);

// Bottleneck-matching W_inf between two equal-size point clouds in R^d.
// Binary search over the distinct pairwise distances with an augmenting-path
// perfect-matching test. Refuses n > kMaxBottleneckPoints.
inline constexpr size_t kMaxBottleneckPoints = 512;
absl::StatusOr<double> WInfExactNd(const Matrix& x, const Matrix& y);

namespace internal {

// Span kernels used by the batch sensitivity code; inputs must already be
// sorted and validated.
double WInfSortedGap(std::span<const double> a, std::span<const double> b);
double DkwSup(std::span<const double> a, std::span<const double> b,
              double band_a, double band_b);

// True when the bipartite graph {(i, j) : dist(i, j) <= threshold} has a
// perfect matching. `dist` is n x n row-major.
bool HasPerfectMatching(std::span<const double> dist, size_t n,
                        double threshold);

}  // namespace internal
}  // namespace srpp

#endif  // SRPP_OT1D_H_
