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

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "absl/strings/str_format.h"
#include "srpp/accountant.h"
#include "srpp/calibrate.h"
#include "srpp/caps.h"
#include "srpp/cli/commands.h"
#include "srpp/ot1d.h"
#include "srpp/rng.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"
#include "srpp/sgdsim.h"

namespace srpp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix Uniform(size_t n, size_t d, Rng& rng) {
  Matrix m(n, d);
  for (double& x : m.data()) x = 2 * rng.Uniform() - 1;
  return m;
}

ScenarioDataset Pair(Matrix a, Matrix b) {
  return *ScenarioDataset::Create(SecretSpace{{"a", "b"}, {{"a", "b"}}},
                                  {{"p", "a", std::move(a)}, {"p", "b", std::move(b)}});
}

Outcome OracleEquivalence() {
  Rng rng(101);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + rng.UniformInt(8);
    std::vector<double> a(n), b(n);
    for (double& x : a) x = 2 * rng.Uniform() - 1;
    for (double& x : b) x = 2 * rng.Uniform() - 1;
    const double fast = *WInf1DExact(*Sorted1DSample::FromUnsorted(a),
                                     *Sorted1DSample::FromUnsorted(b));
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    double best = INFINITY;
    do {
      double worst = 0;
      for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    mismatches += fast != best;
  }
  const double t = Seconds(start);
  return {mismatches == 0 && t < 1.0,
          absl::StrFormat("%d/500 mismatches, %.3f s", mismatches, t)};
}

Outcome ProjectionContraction() {
  Rng rng(102);
  int violations = 0;
  double worst_gap = -INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng.UniformInt(8), d = 1 + rng.UniformInt(4);
    const Matrix x = Uniform(n, d, rng), y = Uniform(n, d, rng);
    const double full = *WInfExactNd(x, y);
    const SliceProfile prof = *SampleSliceProfile(d, 64, 1000 + trial);
    for (size_t l = 0; l < 64; ++l) {
      const double s = *WInf1DExact(*Sorted1DSample::FromUnsorted(*Project(x, prof.direction(l))),
                                    *Sorted1DSample::FromUnsorted(*Project(y, prof.direction(l))));
      worst_gap = std::max(worst_gap, s - full);
      violations += s > full + 1e-12;
    }
  }
  return {violations == 0,
          absl::StrFormat("%d violations in 12800, max(sliced - full) = %.3g", violations,
                          worst_gap)};
}

Outcome Ordering() {
  Rng rng(103);
  int violations = 0;
  for (size_t m : {8, 16, 32}) {
    for (int trial = 0; trial < 100; ++trial) {
      const SliceProfile prof = *SampleSliceProfile(2, m, 7 * m + trial);
      const std::vector<double> shift = {3 * rng.Normal(), 3 * rng.Normal()};
      const DivergenceReport r = *GaussianDivergences(shift, prof, 1.0, 4.0);
      violations += !(r.ave <= r.joint + 1e-9 && r.joint <= *r.full + 1e-9);
    }
  }
  return {violations == 0, absl::StrFormat("%d violations in 300", violations)};
}

double QuadratureRenyi(double a, double sigma, double alpha) {
  const double s2 = sigma * sigma;
  auto g = [&](double x) {
    const double lp = -(x - a) * (x - a) / (2 * s2);
    const double lq = -x * x / (2 * s2);
    return alpha * lp + (1 - alpha) * lq - 0.5 * std::log(2 * std::numbers::pi * s2);
  };
  const double span = 10.0 + alpha * std::abs(a);
  const double x0 = boost::math::tools::brent_find_minima(
                        [&](double x) { return -g(x); }, -span * 10, span * 10, 60)
                        .first;
  const double g0 = g(x0);
  double err = 0.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::exp(g(x) - g0); }, x0 - 40 * sigma, x0 + 40 * sigma, 15,
      1e-14, &err);
  return (g0 + std::log(mass)) / (alpha - 1);
}

Outcome RenyiClosedForm() {
  double worst = 0;
  for (double a : {0.0, 0.75, 1.5, 2.25, 3.0}) {
    for (double sigma : {0.5, 1.375, 2.25, 3.125, 4.0}) {
      for (double alpha : {1.5, 2.0, 4.0, 8.0, 16.0}) {
        worst = std::max(worst, std::abs(RenyiGaussianShift(a, sigma * sigma, alpha) -
                                         QuadratureRenyi(a, sigma, alpha)));
      }
    }
  }
  return {worst <= 1e-6, absl::StrFormat("max |closed - quadrature| = %.3g over 125", worst)};
}

Outcome CalibrationSoundness() {
  Rng rng(105);
  double worst_ave = 0, worst_joint = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const size_t d = 2 + rng.UniformInt(4);
    const SliceProfile prof = *SampleSliceProfile(d, 4 + rng.UniformInt(30), 500 + trial);
    std::vector<double> shift(d);
    for (double& x : shift) x = rng.Normal();
    Matrix zero(4, d), moved(4, d);
    for (size_t r = 0; r < 4; ++r) {
      for (size_t c = 0; c < d; ++c) moved(r, c) = shift[c];
    }
    const SensitivityProfile sens = *BuildProfile(Pair(zero, moved), prof, {});
    const double alpha = 1.5 + 10 * rng.Uniform(), eps = 0.1 + 3 * rng.Uniform();
    const double s_ave = CalibrateAve(sens.mean_square,
                                      *CalibrationSpec::Create(alpha, eps, CalibrationMode::kAve))
                             ->sigma2;
    worst_ave = std::max(
        worst_ave, std::abs(AveSrdGaussian(sens.per_slice, prof.weights(), s_ave, alpha) - eps));
    // Joint attains its bound when every slice sits at the worst value.
    const std::vector<double> flat(prof.size(), std::sqrt(sens.worst));
    const double s_joint =
        CalibrateJoint(sens.worst, *CalibrationSpec::Create(alpha, eps, CalibrationMode::kJoint))
            ->sigma2;
    worst_joint = std::max(
        worst_joint, std::abs(JointSrdGaussian(flat, prof.weights(), s_joint, alpha) - eps));
  }
  return {worst_ave <= 1e-9 && worst_joint <= 1e-9,
          absl::StrFormat("max |Ave-SRD - eps| = %.3g, max |Joint-SRD - eps| = %.3g", worst_ave,
                          worst_joint)};
}

Outcome PacCoverage() {
  const size_t d = 5, m = 32;
  const double gamma = 0.1;
  Rng rng(106);
  std::vector<double> shift(d);
  for (double& x : shift) x = rng.Normal();
  const double norm = Norm2(shift);
  Matrix x(50, d), y(50, d);
  for (size_t r = 0; r < 50; ++r) {
    for (size_t c = 0; c < d; ++c) {
      x(r, c) = rng.Normal();
      y(r, c) = x(r, c) + shift[c];
    }
  }
  const ScenarioDataset data = Pair(x, y);
  // Uniform directions: E[(u.s)^2] = |s|^2 / d.
  const double truth = norm * norm / d;
  SensitivityOptions options;
  options.delta0 = norm;
  int covered = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    const SliceProfile prof = *SampleSliceProfile(d, m, 10000 + r);
    const SensitivityProfile sens = *BuildProfile(data, prof, options);
    covered += *AveUcb(sens, gamma, m) >= truth;
  }
  const double floor = 1 - gamma - 3 * std::sqrt(gamma * (1 - gamma) / reps);
  return {covered >= floor * reps,
          absl::StrFormat("coverage %d/500 = %.3f, floor %.4f", covered,
                          static_cast<double>(covered) / reps, floor)};
}

Outcome JointPacBisection() {
  const double gamma = 4 / std::exp(2.0);
  const SensitivityProfile one = *MakeSensitivityProfile({1.0}, {1.0}, true, 1.0);
  const double s = std::sqrt(
      CalibrateJointPac(one,
                        *CalibrationSpec::Create(2, std::log(3.0), CalibrationMode::kJointPac, gamma),
                        1)
          ->sigma2);
  Rng rng(107);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t m = 1 + rng.UniformInt(64);
    std::vector<double> v(m);
    for (double& x : v) x = rng.Uniform();
    const SensitivityProfile p =
        *MakeSensitivityProfile(v, std::vector<double>(m, 1.0 / m), true, 1.0 + rng.Uniform());
    const double alpha = 1.5 + 10 * rng.Uniform(), eps = 0.05 + 3 * rng.Uniform();
    const double g = 0.01 + 0.2 * rng.Uniform();
    const double star = std::sqrt(
        CalibrateJointPac(p, *CalibrationSpec::Create(alpha, eps, CalibrationMode::kJointPac, g), m)
            ->sigma2);
    bad += !(JointPacObjective(p, alpha, g, star) <= eps &&
             JointPacObjective(p, alpha, g, 0.99 * star) > eps);
  }
  return {std::abs(s - 1.201122) <= 1e-6 && bad == 0,
          absl::StrFormat("m=1 sigma* = %.9f, %d/100 random instances off", s, bad)};
}

Outcome CapArithmetic() {
  const KMoments k = *HypergeometricK2(50000, 20, 512);
  // Place the 20 differing records uniformly; count those inside a fixed
  // batch of 512 (same law as a uniform batch over fixed records).
  Rng rng(108);
  const int draws = 1000000;
  double s1 = 0, s2 = 0, s11 = 0, s12 = 0;
  std::vector<int64_t> picked;
  for (int r = 0; r < draws; ++r) {
    picked.clear();
    for (int64_t j = 50000 - 20; j < 50000; ++j) {
      const auto t = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(j + 1)));
      picked.push_back(std::find(picked.begin(), picked.end(), t) == picked.end() ? t : j);
    }
    int64_t hits = 0;
    for (int64_t p : picked) hits += p < 512;
    const double k1 = static_cast<double>(hits), k2 = k1 * k1;
    s1 += k1;
    s2 += k2;
    s11 += k1 * k1;
    s12 += k1 * k2;
  }
  // K has known mean 20 * 512 / 50000; use it as a control variate for K^2.
  const double m1 = s1 / draws, m2 = s2 / draws;
  const double beta = (s12 / draws - m1 * m2) / (s11 / draws - m1 * m1);
  const double mc = m2 - beta * (m1 - k.mean);
  SgdHyper h;
  h.iterations = 100;
  h.clip = 4;
  h.batch = {512};
  h.lipschitz = {0.2};
  const SliceProfile prof = *SampleSliceProfile(4, 8, 2);
  const std::vector<double> worst_cap = {20.0}, sa_cap = {k.second_moment};
  const HucLedger w = *BuildLedger(h, worst_cap, prof, AccountingMode::kAve);
  const HucLedger s = *BuildLedger(h, sa_cap, prof, AccountingMode::kSaAve);
  const double ratio =
      std::sqrt(SigmaForBudget(w, 16, 8)->sigma2 / SigmaForBudget(s, 16, 8)->sigma2);
  const bool ok = std::abs(k.second_moment - 0.244569) <= 1e-3 &&
                  std::abs(mc - k.second_moment) <= 1e-3 && std::abs(ratio - 40.44) <= 0.5;
  return {ok, absl::StrFormat("E[K^2] = %.7f, Monte Carlo %.7f (plain mean %.7f), "
                              "sa/worst ratio %.4f",
                              k.second_moment, mc, m2, ratio)};
}

Outcome CapCoverage() {
  const int B = 20;
  const double q = 0.15, gamma = 0.1, delta = 0.2;
  const double ek2 = B * q * (1 - q) + (B * q) * (B * q);
  std::vector<double> cdf(B + 1);
  double acc = 0, c = std::pow(1 - q, B);
  for (int k = 0; k <= B; ++k) {
    acc += c;
    cdf[k] = acc;
    c *= static_cast<double>(B - k) / (k + 1) * q / (1 - q);
  }
  Rng rng(109);
  const int reps = 1000, M = 500;
  int ms_ok = 0, tail_ok = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<int64_t> counts(M);
    for (auto& k : counts) {
      k = 0;
      for (int b = 0; b < B; ++b) k += rng.Bernoulli(q);
    }
    const CapEstimate e = *CapsFromCounts(counts, B, delta, gamma);
    ms_ok += e.ms_cap >= ek2;
    tail_ok += cdf[static_cast<size_t>(e.tail_cap)] >= 1 - delta;
  }
  const double floor = 1 - gamma - 3 * std::sqrt(gamma * (1 - gamma) / reps);
  return {ms_ok >= floor * reps && tail_ok >= floor * reps,
          absl::StrFormat("ms-cap %d/1000, tail-cap %d/1000, floor %.4f", ms_ok, tail_ok, floor)};
}

Outcome Composition() {
  const MechanismBudget b[] = {{2, 1, AccountingMode::kAve},
                               {2, 2, AccountingMode::kAve},
                               {2, 3, AccountingMode::kAve}};
  const double total = Compose(b)->total;
  Rng rng(110);
  std::vector<MechanismBudget> many;
  for (int i = 0; i < 9; ++i) many.push_back({3, rng.Uniform() * 1e3 + rng.Uniform() * 1e-9, AccountingMode::kJoint});
  const double ref = Compose(many)->total;
  bool invariant = true;
  for (int k = 0; k < 100; ++k) {
    for (size_t i = many.size() - 1; i > 0; --i) std::swap(many[i], many[rng.UniformInt(i + 1)]);
    invariant = invariant && Compose(many)->total == ref;
  }
  const MechanismBudget mixed[] = {{2, 1, AccountingMode::kAve}, {2, 1, AccountingMode::kJoint}};
  const bool rejected = !Compose(mixed).ok();
  return {total == 6.0 && invariant && rejected,
          absl::StrFormat("compose([1,2,3]) = %.17g, permutation invariant %s, mixed rejected %s",
                          total, invariant ? "yes" : "no", rejected ? "yes" : "no")};
}

// p_low at the realized prevalence of the secret class, p_high Delta records up.
void SetTwoWorld(cli::SweepArgs& a, int64_t delta) {
  const LabeledDataset all = MakeSyntheticLogistic(a.n_train + a.n_test, a.dim, a.classes,
                                                   a.separation, a.seed, a.label_noise);
  const auto split = *SplitDataset(all, a.n_train);
  const auto count = std::count(split.first.labels.begin(), split.first.labels.end(),
                                a.secret_class);
  a.p_low = static_cast<double>(count) / a.n_train;
  a.p_high = static_cast<double>(count + delta) / a.n_train;
}

Outcome SgdPipeline() {
  cli::SweepArgs a;
  a.pipeline = "iterative";
  a.epsilons = {0.5, 2, 8, 32};
  a.alpha = 2;
  a.mode = "sa_ave";
  a.seed = 7;
  a.trials = 400;
  a.n_train = 2000;
  a.n_test = 500;
  a.dim = 20;
  a.iterations = 300;
  a.batch = 64;
  a.clip = 1;
  a.lr = 0.5;
  SetTwoWorld(a, 4);
  const auto start = std::chrono::steady_clock::now();
  auto out = cli::Sweep(a);
  const double t = Seconds(start);
  if (!out.ok()) return {false, std::string(out.status().message())};
  const auto& r = out->report;
  const bool sigma = r["trends"]["sigma_strictly_decreasing"].get<bool>();
  const bool acc = r["trends"]["test_accuracy"]["holds"].get<bool>();
  const bool adv = r["trends"]["advantage"]["holds"].get<bool>();
  const bool shifts = r["shift_check"]["holds"].get<bool>();
  std::string series;
  for (const auto& row : r["rows"]) {
    series += absl::StrFormat(" eps=%g:sigma=%.4g,acc=%.4f,adv=%.4f", row["epsilon"].get<double>(),
                              row["sigma"].get<double>(), row["test_accuracy"].get<double>(),
                              row["advantage"].get<double>());
  }
  return {sigma && acc && adv && shifts && t < 60.0 && r["edit_count"].get<int64_t>() == 4,
          absl::StrFormat("sigma decreasing %d, accuracy trend %d, advantage trend %d, "
                          "shifts within bound %d, %.1f s;%s",
                          sigma, acc, adv, shifts, t, series)};
}

Outcome MiaDirection() {
  cli::SweepArgs a;
  a.pipeline = "iterative";
  a.epsilons = {0.5};
  a.alpha = 2;
  a.seed = 3;
  a.trials = 10;
  a.n_train = 100;
  a.n_test = 100;
  a.dim = 50;
  a.separation = 1;
  a.label_noise = 0.3;
  a.iterations = 500;
  a.batch = 100;
  a.clip = 20;
  a.lr = 1;
  SetTwoWorld(a, 1);
  auto out = cli::Sweep(a);
  if (!out.ok()) return {false, std::string(out.status().message())};
  const double np = out->report["nonprivate"]["auc"].get<double>();
  const double tight = out->report["rows"][0]["auc"].get<double>();
  return {np - tight >= 0.05,
          absl::StrFormat("non-private AUC %.4f, AUC at eps=0.5 %.4f", np, tight)};
}

Outcome Complexity() {
  omp_set_num_threads(1);
  cli::BenchArgs b;
  b.n_grid = {1000, 2000, 4000, 8000};
  b.oracle_grid = {16, 32, 64};
  b.dim = 64;
  b.m = 128;
  b.instances = 10;
  b.reps = 3;
  b.m_doubling = false;
  auto out = cli::Bench(b);
  if (!out.ok()) return {false, std::string(out.status().message())};
  const double t4000 = out->report["sliced_seconds"][2].get<double>();
  const double sliced = out->report["sliced_slope"].get<double>();
  const double oracle = out->report["oracle_slope"].get<double>();
  return {t4000 < 5.0 && sliced <= 1.3 && oracle >= 1.8,
          absl::StrFormat("n=4000 sliced %.3f s, sliced slope %.3f, oracle slope %.3f", t4000,
                          sliced, oracle)};
}

Outcome Conversion() {
  const double v = SrppToSpp(1, 16, 1e-5);
  const double limit = SrppToSpp(1, 16, 1.0);
  return {std::abs(v - 1.767530) <= 1e-6 && limit == 1.0,
          absl::StrFormat("srpp_to_spp(1,16,1e-5) = %.9f (target 1.767530 +- 1e-6; "
                          "1 + ln(1e5)/15 = %.9f), delta=1 gives %.17g",
                          v, 1 + std::log(1e5) / 15, limit)};
}

}  // namespace
}  // namespace srpp

int main() {
  struct Criterion {
    const char* name;
    std::function<srpp::Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1-D W-inf oracle equivalence", srpp::OracleEquivalence},
      {"projection contraction", srpp::ProjectionContraction},
      {"Ave <= Joint <= full ordering", srpp::Ordering},
      {"Gaussian Renyi closed form vs quadrature", srpp::RenyiClosedForm},
      {"calibration soundness on point masses", srpp::CalibrationSoundness},
      {"PAC coverage", srpp::PacCoverage},
      {"joint PAC bisection", srpp::JointPacBisection},
      {"cap arithmetic", srpp::CapArithmetic},
      {"cap coverage", srpp::CapCoverage},
      {"composition", srpp::Composition},
      {"end-to-end SGD pipeline", srpp::SgdPipeline},
      {"MIA directionality", srpp::MiaDirection},
      {"complexity separation", srpp::Complexity},
      {"SRPP to SPP conversion", srpp::Conversion},
  };
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    const srpp::Outcome o = c.run();
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", ++index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
