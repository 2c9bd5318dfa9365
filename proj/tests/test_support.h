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

// Fixtures shared by the unit tests.

#ifndef SRPP_TESTS_TEST_SUPPORT_H_
#define SRPP_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "srpp/matrix.h"
#include "srpp/rng.h"
#include "srpp/scenario.h"

namespace srpp::testing {

#define ASSERT_OK(expr) ASSERT_TRUE((expr).ok()) << (expr)
#define EXPECT_OK(expr) EXPECT_TRUE((expr).ok()) << (expr)
#define ASSERT_OK_AND_ASSIGN(lhs, expr)        \
  auto lhs##_or = (expr);                       \
  ASSERT_TRUE(lhs##_or.ok()) << lhs##_or.status(); \
  auto lhs = *std::move(lhs##_or)

inline Matrix RandomMatrix(size_t rows, size_t cols, Rng& rng, double lo = -1.0,
                           double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = lo + (hi - lo) * rng.Uniform();
  return m;
}

inline std::vector<double> RandomUnit(size_t d, Rng& rng) {
  std::vector<double> u(d);
  double norm = 0.0;
  do {
    for (double& x : u) x = rng.Normal();
    norm = Norm2(u);
  } while (norm < 1e-12);
  for (double& x : u) x /= norm;
  return u;
}

// Min over all permutations of the max matched distance.
inline double BruteBottleneck(const Matrix& x, const Matrix& y) {
  const size_t n = x.rows();
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d;
      if (x.cols() == 1) {
        d = std::abs(x(i, 0) - y(perm[i], 0));
      } else {
        double s = 0.0;
        for (size_t c = 0; c < x.cols(); ++c) {
          const double diff = x(i, c) - y(perm[i], c);
          s += diff * diff;
        }
        d = std::sqrt(s);
      }
      worst = std::max(worst, d);
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// One prior, secrets a and b, pair a->b.
inline ScenarioDataset TwoWorldScenario(Matrix first, Matrix second) {
  SecretSpace space{{"a", "b"}, {{"a", "b"}}};
  std::vector<WorldSample> worlds = {{"p", "a", std::move(first)},
                                     {"p", "b", std::move(second)}};
  return *ScenarioDataset::Create(std::move(space), std::move(worlds));
}

// Worlds are n copies of the origin and of `shift`.
inline ScenarioDataset PointMassScenario(const std::vector<double>& shift,
                                         size_t n = 4) {
  Matrix zero(n, shift.size());
  Matrix moved(n, shift.size());
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < shift.size(); ++c) moved(r, c) = shift[c];
  }
  return TwoWorldScenario(std::move(zero), std::move(moved));
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = info == nullptr ? "srpp" : std::string(info->test_suite_name()) +
                                                      "_" + info->name();
    std::replace(name.begin(), name.end(), '/', '_');
    path_ = std::filesystem::temp_directory_path() / ("srpp_test_" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace srpp::testing

#endif  // SRPP_TESTS_TEST_SUPPORT_H_
