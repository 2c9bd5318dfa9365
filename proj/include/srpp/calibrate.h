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

#ifndef SRPP_CALIBRATE_H_
#define SRPP_CALIBRATE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"

namespace srpp {

enum class CalibrationMode { kAve, kJoint, kAvePac, kJointPac };

std::string_view CalibrationModeName(CalibrationMode mode);
absl::StatusOr<CalibrationMode> ParseCalibrationMode(std::string_view name);

struct CalibrationSpec {
  double alpha = 2.0;
  double epsilon = 1.0;
  std::optional<double> gamma;
  CalibrationMode mode = CalibrationMode::kAve;

  // alpha > 1, epsilon > 0, gamma in (0,1) when present.
  static absl::StatusOr<CalibrationSpec> Create(
      double alpha, double epsilon, CalibrationMode mode,
      std::optional<double> gamma = std::nullopt);
};

// Isotropic Gaussian noise N(0, sigma2 I). dim == 0 means "not yet bound to
// a query"; Privatize binds it. sigma2 == 0 is legal and means no noise.
struct NoiseSpec {
  double sigma2 = 0.0;
  size_t dim = 0;
};

struct DivergenceReport {
  double ave = 0.0;
  double joint = 0.0;
  std::optional<double> full;
  std::vector<double> per_slice;
};

// Renyi divergence of order alpha between N(shift, sigma2) and N(0, sigma2):
// alpha * shift^2 / (2 sigma2). Returns +infinity for sigma2 == 0, shift != 0.
double RenyiGaussianShift(double shift, double sigma2, double alpha);

// sigma2 = alpha * mean_square / (2 epsilon).
absl::StatusOr<NoiseSpec> CalibrateAve(double mean_square,
                                       const CalibrationSpec& spec);
// sigma2 = alpha * worst / (2 epsilon).
absl::StatusOr<NoiseSpec> CalibrateJoint(double worst,
                                         const CalibrationSpec& spec);

// Finite-sample Ave calibration: sigma2 = alpha/(2 eps) * AveUcb(profile).
absl::StatusOr<NoiseSpec> CalibrateAvePac(const SensitivityProfile& profile,
                                          const CalibrationSpec& spec, size_t m);

// Finite-sample Joint calibration: smallest sigma with Phi(sigma) <= epsilon,
// found by bisection (relative tolerance 1e-10).
absl::StatusOr<NoiseSpec> CalibrateJointPac(const SensitivityProfile& profile,
                                            const CalibrationSpec& spec, size_t m);

// Phi(sigma) = 1/(alpha-1) * log(mu_m(sigma) + (b(sigma) - 1) * h) with
// c = alpha(alpha-1)/(2 sigma^2), mu_m the mean of exp(c * v_l^2),
// b = exp(c * delta0^2) and h = sqrt(log(4/gamma)/(2m)). Finite profiles use
// the weighted mean and no Hoeffding term. Evaluated in log space.
double JointPacObjective(const SensitivityProfile& profile, double alpha,
                         double gamma, double sigma);

inline constexpr double kJointPacSigmaFloor = 1e-8;
inline constexpr double kJointPacRelTol = 1e-10;
inline constexpr int kJointPacMaxDoublings = 200;

// sum_l w_l * alpha * shift_l^2 / (2 sigma2).
double AveSrdGaussian(std::span<const double> shifts,
                      std::span<const double> weights, double sigma2,
                      double alpha);
// 1/(alpha-1) * log sum_l w_l exp((alpha-1) * alpha * shift_l^2 / (2 sigma2)).
double JointSrdGaussian(std::span<const double> shifts,
                        std::span<const double> weights, double sigma2,
                        double alpha);

// Ave/Joint sliced and unsliced divergences between N(v, s2 I) and N(0, s2 I).
absl::StatusOr<DivergenceReport> GaussianDivergences(
    std::span<const double> mean_shift, const SliceProfile& profile,
    double sigma2, double alpha);

// epsilon_alpha + log(1/delta)/(alpha-1).
double SrppToSpp(double epsilon_alpha, double alpha, double delta);

struct RenyiPoint {
  double alpha;
  double epsilon;
};
// Minimum of SrppToSpp over a grid of (alpha, epsilon_alpha) guarantees.
absl::StatusOr<double> SrppToSppGrid(std::span<const RenyiPoint> grid,
                                     double delta);

// Prior-free baseline: alpha * delta_group^2 / (2 epsilon).
NoiseSpec GroupEnvelopeBaseline(double delta_group, double alpha,
                                double epsilon);

// query_output + N(0, sigma2 I) from a counter-based stream keyed by seed.
absl::StatusOr<std::vector<double>> Privatize(
    std::span<const double> query_output, const NoiseSpec& noise, uint64_t seed);

}  // namespace srpp

#endif  // SRPP_CALIBRATE_H_
