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

#include "srpp/calibrate.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "srpp/rng.h"

namespace srpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(x) - 1) for x >= 0, without overflow.
double LogExpm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double LogSumExp(std::span<const double> terms) {
  double top = -kInf;
  for (double t : terms) top = std::max(top, t);
  if (top == -kInf) return -kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

absl::Status CheckMode(const CalibrationSpec& spec, CalibrationMode want) {
  if (spec.mode != want) {
    return absl::InvalidArgumentError(absl::StrCat(
        "calibration spec has mode ", std::string(CalibrationModeName(spec.mode)),
        ", expected ", std::string(CalibrationModeName(want))));
  }
  return absl::OkStatus();
}

absl::Status CheckPacInputs(const SensitivityProfile& profile,
                            const CalibrationSpec& spec, size_t m) {
  if (!spec.gamma.has_value()) {
    return absl::InvalidArgumentError("PAC calibration needs gamma");
  }
  if (!(profile.delta0 > 0.0)) {
    return absl::InvalidArgumentError("PAC calibration needs delta0 > 0");
  }
  if (m == 0 || m != profile.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "m = ", m, " does not match profile size ", profile.size()));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view CalibrationModeName(CalibrationMode mode) {
  switch (mode) {
    case CalibrationMode::kAve:
      return "ave";
    case CalibrationMode::kJoint:
      return "joint";
    case CalibrationMode::kAvePac:
      return "ave_pac";
    case CalibrationMode::kJointPac:
      return "joint_pac";
  }
  return "unknown";
}

absl::StatusOr<CalibrationMode> ParseCalibrationMode(std::string_view name) {
  for (CalibrationMode m : {CalibrationMode::kAve, CalibrationMode::kJoint,
                            CalibrationMode::kAvePac, CalibrationMode::kJointPac}) {
    if (CalibrationModeName(m) == name) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown calibration mode '",
                                                 std::string(name), "'"));
}

absl::StatusOr<CalibrationSpec> CalibrationSpec::Create(
    double alpha, double epsilon, CalibrationMode mode,
    std::optional<double> gamma) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order alpha must exceed 1, got ", alpha));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (gamma.has_value() && !(*gamma > 0.0 && *gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0,1), got ", *gamma));
  }
  return CalibrationSpec{alpha, epsilon, gamma, mode};
}

double RenyiGaussianShift(double shift, double sigma2, double alpha) {
  if (shift == 0.0) return 0.0;
  if (sigma2 == 0.0) return kInf;
  return alpha * shift * shift / (2.0 * sigma2);
}

absl::StatusOr<NoiseSpec> CalibrateAve(double mean_square,
                                       const CalibrationSpec& spec) {
  if (absl::Status s = CheckMode(spec, CalibrationMode::kAve); !s.ok()) return s;
  if (!(mean_square >= 0.0)) {
    return absl::InvalidArgumentError("mean-square sensitivity must be >= 0");
  }
  return NoiseSpec{spec.alpha * mean_square / (2.0 * spec.epsilon), 0};
}

absl::StatusOr<NoiseSpec> CalibrateJoint(double worst,
                                         const CalibrationSpec& spec) {
  if (absl::Status s = CheckMode(spec, CalibrationMode::kJoint); !s.ok()) return s;
  if (!(worst >= 0.0)) {
    return absl::InvalidArgumentError("worst-case sensitivity must be >= 0");
  }
  return NoiseSpec{spec.alpha * worst / (2.0 * spec.epsilon), 0};
}

absl::StatusOr<NoiseSpec> CalibrateAvePac(const SensitivityProfile& profile,
                                          const CalibrationSpec& spec,
                                          size_t m) {
  if (absl::Status s = CheckMode(spec, CalibrationMode::kAvePac); !s.ok()) return s;
  if (absl::Status s = CheckPacInputs(profile, spec, m); !s.ok()) return s;
  auto ucb = AveUcb(profile, *spec.gamma, m);
  if (!ucb.ok()) return ucb.status();
  return NoiseSpec{spec.alpha / (2.0 * spec.epsilon) * *ucb, 0};
}

double JointPacObjective(const SensitivityProfile& profile, double alpha,
                         double gamma, double sigma) {
  const double c = alpha * (alpha - 1.0) / (2.0 * sigma * sigma);
  std::vector<double> terms;
  terms.reserve(profile.size());
  double log_mean;
  if (profile.iid_sampled) {
    for (double v : profile.per_slice) terms.push_back(c * v * v);
    log_mean = LogSumExp(terms) - std::log(static_cast<double>(profile.size()));
  } else {
    for (size_t l = 0; l < profile.size(); ++l) {
      if (profile.weights[l] > 0.0) {
        terms.push_back(c * profile.per_slice[l] * profile.per_slice[l] +
                        std::log(profile.weights[l]));
      }
    }
    log_mean = LogSumExp(terms);
  }
  double log_total = log_mean;
  if (profile.iid_sampled && profile.delta0 > 0.0) {
    const double h = std::sqrt(std::log(4.0 / gamma) /
                               (2.0 * static_cast<double>(profile.size())));
    const double correction =
        LogExpm1(c * profile.delta0 * profile.delta0) + std::log(h);
    const double pair[2] = {log_mean, correction};
    log_total = LogSumExp(pair);
  }
  return std::max(0.0, log_total / (alpha - 1.0));
}

absl::StatusOr<NoiseSpec> CalibrateJointPac(const SensitivityProfile& profile,
                                            const CalibrationSpec& spec,
                                            size_t m) {
  if (absl::Status s = CheckMode(spec, CalibrationMode::kJointPac); !s.ok()) {
    return s;
  }
  const bool all_zero =
      std::all_of(profile.per_slice.begin(), profile.per_slice.end(),
                  [](double v) { return v == 0.0; });
  if (all_zero && profile.delta0 == 0.0 && spec.gamma.has_value() &&
      m == profile.size()) {
    return NoiseSpec{kJointPacSigmaFloor * kJointPacSigmaFloor, 0};
  }
  if (absl::Status s = CheckPacInputs(profile, spec, m); !s.ok()) return s;
  const double alpha = spec.alpha;
  const double eps = spec.epsilon;
  const double gamma = *spec.gamma;
  auto phi = [&](double sigma) {
    return JointPacObjective(profile, alpha, gamma, sigma);
  };

  double top = profile.delta0;
  for (double v : profile.per_slice) top = std::max(top, v);
  double lo = kJointPacSigmaFloor;
  if (top == 0.0 || phi(lo) <= eps) {
    return NoiseSpec{lo * lo, 0};
  }
  double hi = std::sqrt(alpha * top * top * (alpha - 1.0) /
                        (2.0 * std::max(eps, 1e-12)));
  hi = std::max(hi, lo);
  int doublings = 0;
  while (phi(hi) > eps) {
    if (++doublings > kJointPacMaxDoublings) {
      return absl::FailedPreconditionError(absl::StrCat(
          "bracket failure: Phi(sigma_hi = ", hi, ") = ", phi(hi),
          " still exceeds epsilon = ", eps));
    }
    hi *= 2.0;
  }
  while (hi - lo > kJointPacRelTol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return NoiseSpec{hi * hi, 0};
}

double AveSrdGaussian(std::span<const double> shifts,
                      std::span<const double> weights, double sigma2,
                      double alpha) {
  double total = 0.0;
  for (size_t l = 0; l < shifts.size(); ++l) {
    if (weights[l] == 0.0) continue;
    total += weights[l] * RenyiGaussianShift(shifts[l], sigma2, alpha);
  }
  return total;
}

double JointSrdGaussian(std::span<const double> shifts,
                        std::span<const double> weights, double sigma2,
                        double alpha) {
  std::vector<double> terms;
  terms.reserve(shifts.size());
  for (size_t l = 0; l < shifts.size(); ++l) {
    if (weights[l] == 0.0) continue;
    terms.push_back((alpha - 1.0) * RenyiGaussianShift(shifts[l], sigma2, alpha) +
                    std::log(weights[l]));
  }
  if (terms.empty()) return 0.0;
  const double top = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(top)) return top;
  return std::max(0.0, LogSumExp(terms) / (alpha - 1.0));
}

absl::StatusOr<DivergenceReport> GaussianDivergences(
    std::span<const double> mean_shift, const SliceProfile& profile,
    double sigma2, double alpha) {
  if (mean_shift.size() != profile.dim()) {
    return absl::InvalidArgumentError("mean shift and profile differ in dimension");
  }
  if (!(alpha > 1.0) || !(sigma2 >= 0.0)) {
    return absl::InvalidArgumentError("need alpha > 1 and sigma2 >= 0");
  }
  DivergenceReport r;
  r.per_slice.reserve(profile.size());
  for (size_t l = 0; l < profile.size(); ++l) {
    r.per_slice.push_back(Dot(mean_shift, profile.direction(l)));
  }
  r.ave = AveSrdGaussian(r.per_slice, profile.weights(), sigma2, alpha);
  r.joint = JointSrdGaussian(r.per_slice, profile.weights(), sigma2, alpha);
  r.full = RenyiGaussianShift(Norm2(mean_shift), sigma2, alpha);
  return r;
}

double SrppToSpp(double epsilon_alpha, double alpha, double delta) {
  return epsilon_alpha + std::log(1.0 / delta) / (alpha - 1.0);
}

absl::StatusOr<double> SrppToSppGrid(std::span<const RenyiPoint> grid,
                                     double delta) {
  if (grid.empty()) {
    return absl::InvalidArgumentError("empty (alpha, epsilon) grid");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0,1)");
  }
  double best = kInf;
  for (const RenyiPoint& p : grid) {
    if (!(p.alpha > 1.0)) {
      return absl::InvalidArgumentError("grid alpha must exceed 1");
    }
    best = std::min(best, SrppToSpp(p.epsilon, p.alpha, delta));
  }
  return best;
}

NoiseSpec GroupEnvelopeBaseline(double delta_group, double alpha,
                                double epsilon) {
  return NoiseSpec{alpha * delta_group * delta_group / (2.0 * epsilon), 0};
}

absl::StatusOr<std::vector<double>> Privatize(
    std::span<const double> query_output, const NoiseSpec& noise,
    uint64_t seed) {
  if (noise.dim != 0 && noise.dim != query_output.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise dimension ", noise.dim, " != query dimension ",
        query_output.size()));
  }
  if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2)) {
    return absl::InvalidArgumentError("noise variance must be finite and >= 0");
  }
  std::vector<double> out(query_output.begin(), query_output.end());
  if (noise.sigma2 == 0.0) return out;
  const double sd = std::sqrt(noise.sigma2);
  Rng rng(seed);
  for (double& x : out) x += sd * rng.Normal();
  return out;
}

}  // namespace srpp
