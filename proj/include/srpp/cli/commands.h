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

#ifndef SRPP_CLI_COMMANDS_H_
#define SRPP_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "srpp/cli/report.h"

namespace srpp::cli {

// 0 ok, 2 usage/validation, 3 data, 4 infeasible, 5 capacity, 1 otherwise.
int ExitCode(const absl::Status& status);

// Applies SRPP_THREADS (a positive integer) to the OpenMP runtime. Returns
// the thread cap in effect, 0 when the variable is unset.
absl::StatusOr<int> ApplyThreadEnv();

struct GenProfileArgs {
  size_t dim = 0;
  size_t m = 0;
  uint64_t seed = 0;
  std::filesystem::path out;
  bool force = false;
};
Json Params(const GenProfileArgs& args);
// Writes the profile CSV and <out>.manifest.json.
absl::Status RunGenProfile(const GenProfileArgs& args);

struct SynthArgs {
  size_t priors = 1;
  size_t n = 100;
  size_t dim = 2;
  double shift = 1.0;
  uint64_t seed = 0;
  std::filesystem::path out_dir;
};
Json Params(const SynthArgs& args);
absl::Status RunSynth(const SynthArgs& args);

struct CalibrateArgs {
  std::filesystem::path manifest;
  std::filesystem::path profile;
  std::string mode = "ave";
  double alpha = 2.0;
  double epsilon = 1.0;
  std::optional<double> gamma;
  std::optional<double> delta0;
  // Set: dkw sensitivity estimates. With joint_union, rho is the global
  // budget split over every (instance, direction) estimate.
  std::optional<double> rho;
  bool joint_union = false;
  bool finite_profile = false;
  std::filesystem::path out_dir;
};
Json Params(const CalibrateArgs& args);

struct CalibrateOutput {
  Json report;
  Json noise;
};
absl::StatusOr<CalibrateOutput> Calibrate(const CalibrateArgs& args);
// report.json, noise.json, manifest.json under out_dir.
absl::Status RunCalibrate(const CalibrateArgs& args);

// Shared discrepancy-cap source for caps and account.
struct CapSourceArgs {
  std::string method = "hypergeometric";  // hypergeometric|binomial_tv|localized|monte_carlo
  std::string scheme = "wor";             // monte_carlo only: wr|wor|poisson
  int64_t population = 0;
  int64_t batch = 0;
  double rate = 0.0;       // poisson
  int64_t differing = 0;   // records that differ between coupled worlds
  double tau = 0.0;        // binomial_tv
  double delta = 0.0;      // tail level
  double gamma = 0.0;      // monte_carlo estimation failure
  int64_t draws = 10000;   // monte_carlo
  uint64_t seed = 0;
};
Json Params(const CapSourceArgs& args);
absl::StatusOr<CapEstimate> ResolveCaps(const CapSourceArgs& args);

struct CapsArgs {
  CapSourceArgs source;
  std::filesystem::path out_dir;
};
absl::StatusOr<Json> CapsReport(const CapsArgs& args);
absl::Status RunCaps(const CapsArgs& args);

struct AccountArgs {
  std::filesystem::path profile;
  std::string mode = "sa_ave";
  double alpha = 2.0;
  std::vector<double> epsilons;
  int iterations = 1;
  double clip = 1.0;
  double lr = 1.0;  // per-iteration Lipschitz constant L_t
  bool compose = false;
  CapSourceArgs caps;
  std::filesystem::path out_dir;
};
Json Params(const AccountArgs& args);
absl::StatusOr<Json> AccountReport(const AccountArgs& args);
absl::Status RunAccount(const AccountArgs& args);

struct SweepArgs {
  std::string pipeline = "static";  // static|iterative
  std::vector<double> epsilons;
  double alpha = 2.0;
  std::string mode;  // default: ave (static), sa_ave (iterative)
  uint64_t seed = 0;
  int trials = 3;
  // static
  std::filesystem::path manifest;
  std::filesystem::path profile;
  std::string prior;  // default: first prior
  // iterative
  size_t n_train = 2000;
  size_t n_test = 500;
  size_t dim = 20;
  int classes = 2;
  double separation = 2.0;
  double label_noise = 0.0;
  int32_t secret_class = 1;
  // Negative: p_low is the realized secret-class share of the training split,
  // p_high is p_low + 4 / n_train.
  double p_low = -1.0;
  double p_high = -1.0;
  int iterations = 300;
  int64_t batch = 64;
  double clip = 1.0;
  double lr = 0.1;
  size_t slices = 8;
  std::filesystem::path out_dir;
};
Json Params(const SweepArgs& args);

struct SweepOutput {
  Json report;
  std::string csv;
  std::vector<std::pair<std::string, std::string>> plots;  // file name, svg
};
absl::StatusOr<SweepOutput> Sweep(const SweepArgs& args);
absl::Status RunSweep(const SweepArgs& args);

struct BenchArgs {
  std::vector<size_t> n_grid = {1000, 2000, 4000, 8000};
  std::vector<size_t> oracle_grid = {16, 32, 64};
  size_t dim = 64;
  size_t m = 128;
  size_t instances = 10;
  int reps = 3;
  uint64_t seed = 0;
  bool m_doubling = true;
  std::filesystem::path out_dir;
};
Json Params(const BenchArgs& args);

struct BenchOutput {
  Json report;
  std::string csv;
};
absl::StatusOr<BenchOutput> Bench(const BenchArgs& args);
absl::Status RunBench(const BenchArgs& args);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace srpp::cli

#endif  // SRPP_CLI_COMMANDS_H_
