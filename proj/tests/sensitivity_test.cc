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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "srpp/ot1d.h"
#include "srpp/rng.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"
#include "test_support.h"

namespace srpp {
namespace {

using ::srpp::testing::BruteBottleneck;
using ::srpp::testing::PointMassScenario;
using ::srpp::testing::RandomMatrix;
using ::srpp::testing::RandomUnit;
using ::srpp::testing::TwoWorldScenario;

Matrix ProjectToColumn(const Matrix& x, const std::vector<double>& u) {
  const std::vector<double> p = *Project(x, u);
  Matrix m(p.size(), 1);
  for (size_t i = 0; i < p.size(); ++i) m(i, 0) = p[i];
  return m;
}

// Three priors, secrets a,b,c, pairs a->b and c->a, random worlds.
ScenarioDataset RandomScenario(size_t n, size_t d, Rng& rng) {
  SecretSpace space{{"a", "b", "c"}, {{"a", "b"}, {"c", "a"}}};
  std::vector<WorldSample> worlds;
  for (const char* p : {"p0", "p1", "p2"}) {
    for (const char* s : {"a", "b", "c"}) {
      worlds.push_back({p, s, RandomMatrix(n, d, rng)});
    }
  }
  return *ScenarioDataset::Create(std::move(space), std::move(worlds));
}

TEST(PerSliceTest, IdenticalWorldsGiveZero) {
  Rng rng(1);
  Matrix x = RandomMatrix(5, 3, rng);
  const ScenarioDataset d = TwoWorldScenario(x, x);
  EXPECT_EQ(*PerSliceSensitivity(d, RandomUnit(3, rng), SensitivityMode::kExact), 0.0);
}

TEST(PerSliceTest, PointMassShift) {
  Rng rng(2);
  const std::vector<double> v = {0.5, -2.0, 1.0};
  const ScenarioDataset d = PointMassScenario(v);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> u = RandomUnit(3, rng);
    EXPECT_NEAR(*PerSliceSensitivity(d, u, SensitivityMode::kExact),
                std::abs(Dot(v, u)), 1e-15);
  }
}

TEST(PerSliceTest, MatchesMatchingOracleOverInstances) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 1 + rng.UniformInt(7);
    const ScenarioDataset d = RandomScenario(n, 3, rng);
    const std::vector<double> u = RandomUnit(3, rng);
    double expect = 0.0;
    for (const ScenarioInstance& inst : d.instances()) {
      expect = std::max(expect,
                        BruteBottleneck(ProjectToColumn(d.worlds()[inst.first_world].samples, u),
                                        ProjectToColumn(d.worlds()[inst.second_world].samples, u)));
    }
    EXPECT_EQ(*PerSliceSensitivity(d, u, SensitivityMode::kExact), expect);
  }
}

TEST(PerSliceTest, ErrorsNameTheInstance) {
  Rng rng(4);
  const ScenarioDataset d = TwoWorldScenario(RandomMatrix(3, 2, rng), RandomMatrix(4, 2, rng));
  auto r = PerSliceSensitivity(d, std::vector<double>{1.0, 0.0}, SensitivityMode::kExact);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.status().message().find("(p, a->b)"), std::string::npos) << r.status();
  EXPECT_FALSE(PerSliceSensitivity(d, std::vector<double>{1.0, 1.0},
                                   SensitivityMode::kExact).ok());
  EXPECT_FALSE(PerSliceSensitivity(d, std::vector<double>{1.0, 0.0},
                                   SensitivityMode::kDkw).ok());
}

TEST(MakeProfileTest, Aggregates) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({1.0, 2.0}, {0.5, 0.5}, false, 0.0));
  EXPECT_DOUBLE_EQ(p.mean_square, 2.5);
  EXPECT_DOUBLE_EQ(p.worst, 4.0);
  ASSERT_OK_AND_ASSIGN(q, MakeSensitivityProfile({0.7, 0.7, 0.7}, {0.2, 0.3, 0.5}, false, 0.0));
  EXPECT_DOUBLE_EQ(q.worst, 0.49);
  EXPECT_NEAR(q.mean_square, 0.49, 1e-16);
  EXPECT_LE(q.mean_square, q.worst);
  EXPECT_FALSE(MakeSensitivityProfile({}, {}, false, 0.0).ok());
}

TEST(MakeProfileTest, ClampsToDelta0) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({0.5, 3.0}, {0.5, 0.5}, false, 1.0));
  EXPECT_EQ(p.per_slice[1], 1.0);
  EXPECT_LE(p.worst, p.delta0 * p.delta0);
}

TEST(BuildProfileTest, EmptyAndMismatchedProfiles) {
  const ScenarioDataset d = PointMassScenario({1.0, 0.0});
  ASSERT_OK_AND_ASSIGN(p3, SampleSliceProfile(3, 4, 1));
  EXPECT_FALSE(BuildProfile(d, p3, {}).ok());
}

TEST(BuildProfileTest, ParallelMatchesSerialBitwise) {
  Rng rng(5);
  const ScenarioDataset d = RandomScenario(60, 6, rng);
  ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(6, 97, 9));
  for (SensitivityOptions opt :
       {SensitivityOptions{SensitivityMode::kExact, 0.0, false, 0.0},
        SensitivityOptions{SensitivityMode::kDkw, 0.2, false, 3.0},
        SensitivityOptions{SensitivityMode::kDkw, 0.5, true, 0.0}}) {
    ASSERT_OK_AND_ASSIGN(a, BuildProfile(d, prof, opt));
    ASSERT_OK_AND_ASSIGN(b, reference::BuildProfileSerial(d, prof, opt));
    EXPECT_EQ(a.per_slice, b.per_slice);
    EXPECT_EQ(a.mean_square, b.mean_square);
    EXPECT_EQ(a.worst, b.worst);
    EXPECT_EQ(a.rho, b.rho);
    ASSERT_OK_AND_ASSIGN(again, BuildProfile(d, prof, opt));
    EXPECT_EQ(a.per_slice, again.per_slice);
  }
}

TEST(BuildProfileTest, JointUnionSplitsRho) {
  Rng rng(6);
  const ScenarioDataset d = RandomScenario(400, 2, rng);
  ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(2, 5, 1));
  ASSERT_OK_AND_ASSIGN(p, BuildProfile(d, prof, {SensitivityMode::kDkw, 0.1, true, 0.0}));
  ASSERT_TRUE(p.rho.has_value());
  EXPECT_DOUBLE_EQ(*p.rho, 0.1 / 2.0 / (6.0 * 5.0));
}

TEST(BuildProfileTest, DkwDominatesExact) {
  Rng rng(7);
  const ScenarioDataset d = RandomScenario(80, 3, rng);
  ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(3, 32, 2));
  ASSERT_OK_AND_ASSIGN(ex, BuildProfile(d, prof, {}));
  for (double rho : {0.01, 0.2, 0.9}) {
    ASSERT_OK_AND_ASSIGN(dk, BuildProfile(d, prof, {SensitivityMode::kDkw, rho, false, 0.0}));
    for (size_t l = 0; l < prof.size(); ++l) EXPECT_GE(dk.per_slice[l], ex.per_slice[l]);
  }
}

TEST(BuildProfileTest, InfeasibleConfidencePropagates) {
  Rng rng(8);
  const ScenarioDataset d = RandomScenario(3, 2, rng);
  ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(2, 3, 2));
  auto r = BuildProfile(d, prof, {SensitivityMode::kDkw, 0.01, false, 0.0});
  EXPECT_TRUE(absl::IsFailedPrecondition(r.status())) << r.status();
  EXPECT_NE(r.status().message().find("direction 0"), std::string::npos);
}

TEST(SlicingDominationTest, SlicedBelowFullOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 1 + rng.UniformInt(8);
    const ScenarioDataset d = RandomScenario(n, 3, rng);
    const double full = *FullSensitivityOracle(d);
    ASSERT_OK_AND_ASSIGN(prof, SampleSliceProfile(3, 16, trial));
    ASSERT_OK_AND_ASSIGN(p, BuildProfile(d, prof, {}));
    for (double v : p.per_slice) EXPECT_LE(v, full + 1e-12);
  }
}

TEST(AveUcbTest, HoeffdingArithmetic) {
  const double gamma = 4.0 / std::exp(2.0);
  ASSERT_OK_AND_ASSIGN(z, MakeSensitivityProfile({0.0, 0.0}, {0.5, 0.5}, true, 1.0));
  EXPECT_NEAR(*AveUcb(z, gamma, 2), std::sqrt(0.5), 1e-15);
  ASSERT_OK_AND_ASSIGN(o, MakeSensitivityProfile({1.0, 1.0}, {0.5, 0.5}, true, 1.0));
  EXPECT_NEAR(*AveUcb(o, gamma, 2), 1.0 + std::sqrt(0.5), 1e-15);
}

TEST(AveUcbTest, VanishingCorrection) {
  const size_t m = 1000000;
  std::vector<double> v(m, 0.5);
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile(v, std::vector<double>(m, 1.0 / m), true, 1.0));
  EXPECT_NEAR(*AveUcb(p, 0.1, m), 0.25, 2e-3);
}

TEST(AveUcbTest, FiniteProfilesDropCorrection) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({1.0, 3.0}, {0.75, 0.25}, false, 5.0));
  EXPECT_DOUBLE_EQ(*AveUcb(p, 0.1, 2), 3.0);
}

TEST(AveUcbTest, Errors) {
  ASSERT_OK_AND_ASSIGN(p, MakeSensitivityProfile({1.0}, {1.0}, true, 0.0));
  EXPECT_FALSE(AveUcb(p, 0.1, 1).ok());
  ASSERT_OK_AND_ASSIGN(q, MakeSensitivityProfile({1.0}, {1.0}, true, 2.0));
  EXPECT_FALSE(AveUcb(q, 0.0, 1).ok());
  EXPECT_FALSE(AveUcb(q, 1.0, 1).ok());
  EXPECT_FALSE(AveUcb(q, 0.5, 2).ok());
}

TEST(FullOracleTest, Examples) {
  Rng rng(10);
  Matrix x = RandomMatrix(6, 3, rng);
  EXPECT_EQ(*FullSensitivityOracle(TwoWorldScenario(x, x)), 0.0);
  const std::vector<double> v = {1.0, 2.0, -2.0};
  EXPECT_DOUBLE_EQ(*FullSensitivityOracle(PointMassScenario(v)), 3.0);
  Matrix y = RandomMatrix(6, 3, rng);
  EXPECT_EQ(*FullSensitivityOracle(TwoWorldScenario(x, y)), BruteBottleneck(x, y));
  EXPECT_TRUE(absl::IsResourceExhausted(
      FullSensitivityOracle(TwoWorldScenario(Matrix(65, 1), Matrix(65, 1))).status()));
}

}  // namespace
}  // namespace srpp
