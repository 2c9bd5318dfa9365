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

#ifndef SRPP_SCENARIO_H_
#define SRPP_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/matrix.h"

namespace srpp {

// A finite set of unit directions with nonnegative weights summing to one.
//
// `iid_sampled` marks profiles whose directions were drawn i.i.d. from a
// continuous slice distribution; only those carry the Monte-Carlo slicing
// correction in the finite-sample calibrations.
class SliceProfile {
 public:
  // Validates unit norms (1e-9) and weights. Weights summing to within
  // [0.999, 1.001] are renormalized; anything else is rejected.
  static absl::StatusOr<SliceProfile> Create(Matrix directions,
                                             std::vector<double> weights,
                                             uint64_t seed = 0,
                                             bool iid_sampled = false);

  size_t dim() const { return directions_.cols(); }
  size_t size() const { return directions_.rows(); }
  std::span<const double> direction(size_t l) const {
    return directions_.row(l);
  }
  const Matrix& directions() const { return directions_; }
  std::span<const double> weights() const { return weights_; }
  uint64_t seed() const { return seed_; }
  bool iid_sampled() const { return iid_sampled_; }

  // Copy with the sampling flag replaced.
  SliceProfile MarkSampled(bool iid_sampled) const {
    SliceProfile p = *this;
    p.iid_sampled_ = iid_sampled;
    return p;
  }

  friend bool operator==(const SliceProfile&, const SliceProfile&) = default;

 private:
  Matrix directions_;
  std::vector<double> weights_;
  uint64_t seed_ = 0;
  bool iid_sampled_ = false;
};

// m directions i.i.d. uniform on the unit sphere in R^dim, uniform weights.
// Deterministic in `seed`.
absl::StatusOr<SliceProfile> SampleSliceProfile(size_t dim, size_t m,
                                                uint64_t seed);

struct SecretPair {
  std::string first;
  std::string second;
  friend bool operator==(const SecretPair&, const SecretPair&) = default;
};

// Secret identifiers and the discriminatory pairs over them.
struct SecretSpace {
  std::vector<std::string> secrets;
  std::vector<SecretPair> pairs;

  absl::Status Validate() const;
};

// Rows are i.i.d. draws of the query output conditioned on (prior, secret).
struct WorldSample {
  std::string prior_id;
  std::string secret_id;
  Matrix samples;
};

// One (prior, secret pair) element of the instantiated family.
struct ScenarioInstance {
  std::string prior_id;
  SecretPair pair;
  size_t first_world;
  size_t second_world;
};

class ScenarioDataset {
 public:
  static absl::StatusOr<ScenarioDataset> Create(SecretSpace secret_space,
                                                std::vector<WorldSample> worlds);

  const SecretSpace& secret_space() const { return secret_space_; }
  const std::vector<WorldSample>& worlds() const { return worlds_; }
  // Lexicographically ordered prior identifiers.
  const std::vector<std::string>& priors() const { return priors_; }
  // Priors outer (lexicographic), pairs inner (declaration order).
  const std::vector<ScenarioInstance>& instances() const { return instances_; }
  size_t dim() const { return dim_; }

 private:
  SecretSpace secret_space_;
  std::vector<WorldSample> worlds_;
  std::vector<std::string> priors_;
  std::vector<ScenarioInstance> instances_;
  size_t dim_ = 0;
};

// Reads a manifest (see docs/formats.md) and every sample CSV it references.
// Relative file paths resolve against the manifest's directory.
absl::StatusOr<ScenarioDataset> LoadScenario(
    const std::filesystem::path& manifest_path);

// Sample CSV: header f0,...,f{d-1} followed by rows of decimals.
// Writes `dir`/scenario.txt plus one world_<i>.csv per world and returns the
// manifest path. Existing files are overwritten.
absl::StatusOr<std::filesystem::path> WriteScenario(
    const std::filesystem::path& dir, const ScenarioDataset& data);

// Secrets {a, b} with pair a->b under `num_priors` priors p0, p1, ...; world
// (p_j, a) is N(0, I) and (p_j, b) is N(mu_j, I) with |mu_j| = shift along a
// random direction. Prior j draws from Rng(seed, j).
absl::StatusOr<ScenarioDataset> GaussianShiftScenario(size_t num_priors,
                                                      size_t n, size_t dim,
                                                      double shift,
                                                      uint64_t seed);

absl::StatusOr<Matrix> ReadSampleCsv(const std::filesystem::path& path);
absl::Status WriteSampleCsv(const std::filesystem::path& path,
                            const Matrix& samples);

// Slice-profile CSV: header u0,...,u{d-1},weight.
absl::StatusOr<SliceProfile> ReadSliceProfile(
    const std::filesystem::path& path);
std::string FormatSliceProfile(const SliceProfile& profile);

// Inner products of each sample row with `direction`.
absl::StatusOr<std::vector<double>> Project(const Matrix& samples,
                                            std::span<const double> direction);

// Unchecked projection into `out` (resized to samples.rows()).
void ProjectInto(const Matrix& samples, std::span<const double> direction,
                 std::vector<double>& out);

// Shortest decimal representation that round-trips a double.
std::string FormatDouble(double v);

}  // namespace srpp

#endif  // SRPP_SCENARIO_H_
