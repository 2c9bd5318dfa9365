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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "gtest/gtest.h"
#include "srpp/calibrate.h"
#include "srpp/rng.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"
#include "test_support.h"

namespace srpp {
namespace {

using ::srpp::testing::RandomUnit;

CalibrationSpec Spec(double alpha, double eps, CalibrationMode mode,
                     std::optional<double> gamma = std::nullopt) {
  return *CalibrationSpec::Create(alpha, eps, mode, gamma);
}

// D_alpha(N(a, s2) || N(0, s2)) by adaptive quadrature of
// 1/(alpha-1) log int p^alpha q^(1-alpha), in log space.
double QuadratureRenyi(double a, double sigma, double alpha) {
  const double s2 = sigma * sigma;
  auto g = [&](double x) {
    const double lp = -(x - a) * (x - a) / (2 * s2);
    const double lq = -x * x / (2 * s2);
    return alpha * lp + (1 - alpha) * lq - 0.5 * std::log(2 * std::numbers::pi * s2);
  };
  const double span = 10.0 + alpha * std::abs(a);
  auto peak = boost::math::tools::brent_find_minima(
      [&](double x) { return -g(x); }, -span * 10, span * 10, 60);
  const double x0 = peak.first;
  const double g0 = g(x0);
  double err = 0.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::exp(g(x) - g0); }, x0 - 40 * sigma, x0 + 40 * sigma, 15,
      1e-14, &err);
  return (g0 + std::log(mass)) / (alpha - 1);
}

TEST(CalibrationSpecTest, Validation) {
  EXPECT_FALSE(CalibrationSpec::Create(1.0, 1.0, CalibrationMode::kAve).ok());
  EXPECT_FALSE(CalibrationSpec::Create(2.0, 0.0, CalibrationMode::kAve).ok());
  EXPECT_FALSE(CalibrationSpec::Create(2.0, 1.0, CalibrationMode::kAvePac, 1.0).ok());
  EXPECT_TRUE(CalibrationSpec::Create(2.0, 1.0, CalibrationMode::kAvePac, 0.1).ok());
}

TEST(CalibrationModeTest, NamesRoundTrip) {
  for (auto m : {CalibrationMode::kAve, CalibrationMode::kJoint, CalibrationMode::kAvePac,
                 CalibrationMode::kJointPac}) {
    EXPECT_EQ(*ParseCalibrationMode(CalibrationModeName(m)), m);
  }
  EXPECT_FALSE(ParseCalibrationMode("average").ok());
}

TEST(RenyiGaussianShiftTest, Examples) {
  EXPECT_EQ(RenyiGaussianShift(0.0, 3.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(RenyiGaussianShift(1.0, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(RenyiGaussianShift(3.0, 4.0, 4.0), 4.5);
  EXPECT_TRUE(std::isinf(RenyiGaussianShift(1.0, 0.0, 2.0)));
  EXPECT_EQ(RenyiGaussianShift(0.0, 0.0, 2.0), 0.0);
}

TEST(RenyiGaussianShiftTest, MatchesQuadrature) {
  EXPECT_NEAR(QuadratureRenyi(1.0, 1.0, 2.0), 1.0, 1e-9);
  EXPECT_NEAR(QuadratureRenyi(3.0, 2.0, 4.0), 4.5, 1e-9);
  for (double a : {0.0, 0.75, 1.5, 2.25, 3.0}) {
    for (double sigma : {0.5, 1.375, 2.25, 3.125, 4.0}) {
      for (double alpha : {1.5, 2.0, 4.0, 8.0, 16.0}) {
        EXPECT_NEAR(RenyiGaussianShift(a, sigma * sigma, alpha),
                    QuadratureRenyi(a, sigma, alpha), 1e-6)
            << a << " " << sigma << " " << alpha;
      }
    }
  }
}

TEST(CalibrateTest, AveAndJoint) {
  EXPECT_DOUBLE_EQ(CalibrateAve(1.0, Spec(4, 2, CalibrationMode::kAve))->sigma2, 1.0);
  EXPECT_EQ(CalibrateAve(0.0, Spec(4, 2, CalibrationMode::kAve))->sigma2, 0.0);
  EXPECT_DOUBLE_EQ(CalibrateJoint(4.0, Spec(4, 2, CalibrationMode::kJoint))->sigma2, 4.0);
  EXPECT_EQ(CalibrateJoint(0.0, Spec(4, 2, CalibrationMode::kJoint))->sigma2, 0.0);
  EXPECT_FALSE(CalibrateAve(1.0, Spec(4, 2, CalibrationMode::kJoint)).ok());
  EXPECT_FALSE(CalibrateJoint(1.0, Spec(4, 2, CalibrationMode::kAve)).ok());
}

TEST(CalibrateTest, Monotone) {
  double prev = 0.0;
  for (double alpha : {1.5, 2.0, 4.0, 8.0}) {
    const double s = CalibrateAve(0.3, Spec(alpha, 1, CalibrationMode::kAve))->sigma2;
    EXPECT_GT(s, prev);
    prev = s;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.5, 1.0, 4.0}) {
    const double s = CalibrateJoint(0.3, Spec(2, eps, CalibrationMode::kJoint))->sigma2;
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(CalibrateTest, SoundOnPointMassesAttainingBounds) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(3, 12, trial));
    std::vector<double> v = RandomUnit(3, rng);
    for (double& x : v) x *= 0.5 + 2 * rng.Uniform();
    ASSERT_OK_AND_ASSIGN(sens, BuildProfile(testing::PointMassScenario(v), prof, {}));
    const double alpha = 2 + 6 * rng.Uniform(), eps = 0.2 + rng.Uniform();
    const double s_ave =
        CalibrateAve(sens.mean_square, Spec(alpha, eps, CalibrationMode::kAve))->sigma2;
    ASSERT_OK_AND_ASSIGN(d_ave, GaussianDivergences(v, prof, s_ave, alpha));
    EXPECT_NEAR(d_ave.ave, eps, 1e-9);
    const double star = std::sqrt(sens.worst);
    const std::vector<double> flat(prof.size(), star);
    const double s_joint =
        CalibrateJoint(sens.worst, Spec(alpha, eps, CalibrationMode::kJoint))->sigma2;
    EXPECT_NEAR(JointSrdGaussian(flat, prof.weights(), s_joint, alpha), eps, 1e-9);
    ASSERT_OK_AND_ASSIGN(d_joint, GaussianDivergences(v, prof, s_joint, alpha));
    EXPECT_LE(d_joint.joint, eps + 1e-9);
  }
}

TEST(AvePacTest, Examples) {
  const double gamma = 4 / std::exp(2.0);
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({0.0, 0.0}, {0.5, 0.5}, true, 1.0));
  EXPECT_NEAR(CalibrateAvePac(p, Spec(2, 1, CalibrationMode::kAvePac, gamma), 2)->sigma2,
              std::sqrt(0.5), 1e-15);
  const double loose = CalibrateAvePac(p, Spec(2, 1, CalibrationMode::kAvePac, 0.2), 2)->sigma2;
  const double tight = CalibrateAvePac(p, Spec(2, 1, CalibrationMode::kAvePac, 0.01), 2)->sigma2;
  EXPECT_GT(tight, loose);
  EXPECT_FALSE(CalibrateAvePac(p, Spec(2, 1, CalibrationMode::kAvePac), 2).ok());
  ASSERT_OK_AND_ASSIGN(nb, MakeSensitivityProfile({0.0, 0.0}, {0.5, 0.5}, true, 0.0));
  EXPECT_FALSE(CalibrateAvePac(nb, Spec(2, 1, CalibrationMode::kAvePac, 0.1), 2).ok());
}

TEST(AvePacTest, LargeMApproachesAve) {
  const size_t m = 1000000;
  Rng rng(4);
  std::vector<double> v(m);
  for (double& x : v) x = rng.Uniform();
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile(v, std::vector<double>(m, 1.0 / m), true, 1.0));
  const double pac = CalibrateAvePac(p, Spec(2, 1, CalibrationMode::kAvePac, 0.1), m)->sigma2;
  const double ave = CalibrateAve(p.mean_square, Spec(2, 1, CalibrationMode::kAve))->sigma2;
  EXPECT_GT(pac, ave);
  EXPECT_NEAR(pac, ave, 2e-3);
}

TEST(JointPacTest, ClosedFormSingleSlice) {
  const double gamma = 4 / std::exp(2.0);
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({1.0}, {1.0}, true, 1.0));
  ASSERT_OK_AND_ASSIGN(
      n, CalibrateJointPac(p, Spec(2, std::log(3.0), CalibrationMode::kJointPac, gamma), 1));
  EXPECT_NEAR(std::sqrt(n.sigma2), 1.0 / std::sqrt(std::log(2.0)), 1e-6);
  EXPECT_NEAR(std::sqrt(n.sigma2), 1.2011224087864498, 1e-9);
}

TEST(JointPacTest, DegenerateReturnsFloor) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({0.0, 0.0}, {0.5, 0.5}, true, 0.0));
  ASSERT_OK_AND_ASSIGN(n, CalibrateJointPac(p, Spec(2, 1, CalibrationMode::kJointPac, 0.1), 2));
  EXPECT_DOUBLE_EQ(n.sigma2, kJointPacSigmaFloor * kJointPacSigmaFloor);
  ASSERT_OK_AND_ASSIGN(q, MakeSensitivityProfile({0.5, 0.0}, {0.5, 0.5}, true, 0.0));
  EXPECT_FALSE(CalibrateJointPac(q, Spec(2, 1, CalibrationMode::kJointPac, 0.1), 2).ok());
  EXPECT_FALSE(CalibrateJointPac(p, Spec(2, 1, CalibrationMode::kJointPac), 2).ok());
}

TEST(JointPacTest, MinimalAndFeasibleOnRandomProfiles) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t m = 1 + rng.UniformInt(64);
    std::vector<double> v(m);
    for (double& x : v) x = rng.Uniform();
    const double delta0 = 1.0 + rng.Uniform();
    ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile(v, std::vector<double>(m, 1.0 / m), true, delta0));
    const double alpha = 1.5 + 10 * rng.Uniform();
    const double eps = 0.05 + 3 * rng.Uniform();
    const double gamma = 0.01 + 0.2 * rng.Uniform();
    ASSERT_OK_AND_ASSIGN(n, CalibrateJointPac(p, Spec(alpha, eps, CalibrationMode::kJointPac, gamma), m));
    const double s = std::sqrt(n.sigma2);
    EXPECT_LE(JointPacObjective(p, alpha, gamma, s), eps);
    EXPECT_GT(JointPacObjective(p, alpha, gamma, 0.99 * s), eps);
  }
}

TEST(JointPacTest, ObjectiveDecreasing) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({0.3, 0.9, 0.1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, true, 1.0));
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 0.05; s < 50; s *= 1.3) {
    const double phi = JointPacObjective(p, 3.0, 0.1, s);
    EXPECT_LT(phi, prev);
    prev = phi;
  }
}

TEST(JointPacTest, FiniteProfileIsExactJoint) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({1.0, 3.0}, {0.5, 0.5}, false, 3.0));
  const double s = 1.7;
  EXPECT_NEAR(JointPacObjective(p, 2.0, 0.1, s),
              JointSrdGaussian(p.per_slice, p.weights, s * s, 2.0), 1e-12);
}

TEST(SrdTest, Examples) {
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_EQ(AveSrdGaussian(std::vector<double>{0, 0}, w, 1, 2), 0.0);
  EXPECT_EQ(JointSrdGaussian(std::vector<double>{0, 0}, w, 1, 2), 0.0);
  EXPECT_DOUBLE_EQ(AveSrdGaussian(std::vector<double>{2.0}, std::vector<double>{1.0}, 3, 4),
                   RenyiGaussianShift(2.0, 3, 4));
  EXPECT_DOUBLE_EQ(AveSrdGaussian(std::vector<double>{1, 3}, w, 1, 2), 5.0);
  EXPECT_NEAR(JointSrdGaussian(std::vector<double>{1.5, 1.5}, w, 2, 3),
              RenyiGaussianShift(1.5, 2, 3), 1e-12);
  const double joint = JointSrdGaussian(std::vector<double>{1, 3}, w, 1, 2);
  EXPECT_NEAR(joint, std::log(0.5 * std::exp(1.0) + 0.5 * std::exp(9.0)), 1e-12);
  EXPECT_NEAR(joint, 8.30719, 1e-5);
  EXPECT_GE(joint, 5.0);
}

TEST(SrdTest, NoOverflow) {
  const std::vector<double> w = {0.5, 0.5};
  const double j = JointSrdGaussian(std::vector<double>{1, 300}, w, 1, 16);
  EXPECT_TRUE(std::isfinite(j));
  EXPECT_NEAR(j, 16 * 300.0 * 300 / 2 + std::log(0.5) / 15, 1e-6);
}

TEST(SrdTest, OrderingOnRandomShifts) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(2, 8 << (trial % 3), trial));
    std::vector<double> v = {rng.Normal(), rng.Normal()};
    ASSERT_OK_AND_ASSIGN(d, GaussianDivergences(v, prof, 1.0, 4.0));
    EXPECT_LE(d.ave, d.joint + 1e-9);
    EXPECT_LE(d.joint, *d.full + 1e-9);
  }
}

TEST(ConversionTest, SrppToSpp) {
  EXPECT_NEAR(SrppToSpp(1, 16, 1e-5), 1 + std::log(1e5) / 15, 1e-15);
  EXPECT_NEAR(SrppToSpp(1, 16, 1 - 1e-15), 1.0, 1e-12);
  const RenyiPoint one[] = {{16, 1}};
  EXPECT_EQ(*SrppToSppGrid(one, 1e-5), SrppToSpp(1, 16, 1e-5));
  const RenyiPoint grid[] = {{2, 0.1}, {16, 1}, {64, 5}};
  EXPECT_DOUBLE_EQ(*SrppToSppGrid(grid, 1e-5), SrppToSpp(1, 16, 1e-5));
  EXPECT_FALSE(SrppToSppGrid({}, 0.1).ok());
}

TEST(BaselineTest, GroupEnvelope) {
  EXPECT_EQ(GroupEnvelopeBaseline(0, 4, 2).sigma2, 0.0);
  EXPECT_DOUBLE_EQ(GroupEnvelopeBaseline(2, 4, 2).sigma2, 4.0);
  EXPECT_GE(GroupEnvelopeBaseline(1.0, 3, 1).sigma2,
            CalibrateAve(0.8, Spec(3, 1, CalibrationMode::kAve))->sigma2);
}

TEST(PrivatizeTest, IdentityAndDeterminism) {
  const std::vector<double> q = {1.0, -2.0, 3.5};
  EXPECT_EQ(*Privatize(q, {0.0, 3}, 7), q);
  EXPECT_EQ(*Privatize(q, {2.0, 3}, 7), *Privatize(q, {2.0, 3}, 7));
  EXPECT_NE(*Privatize(q, {2.0, 3}, 7), *Privatize(q, {2.0, 3}, 8));
  EXPECT_FALSE(Privatize(q, {2.0, 2}, 7).ok());
}

TEST(PrivatizeTest, Variance) {
  const std::vector<double> q = {0.0, 10.0};
  const double sigma2 = 2.5;
  double s[2] = {0, 0}, s2[2] = {0, 0};
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    const auto y = *Privatize(q, {sigma2, 2}, static_cast<uint64_t>(r));
    for (int j = 0; j < 2; ++j) {
      s[j] += y[j] - q[j];
      s2[j] += (y[j] - q[j]) * (y[j] - q[j]);
    }
  }
  for (int j = 0; j < 2; ++j) {
    const double mean = s[j] / reps;
    EXPECT_NEAR(s2[j] / reps - mean * mean, sigma2, 0.03 * sigma2);
  }
}

}  // namespace
}  // namespace srpp
