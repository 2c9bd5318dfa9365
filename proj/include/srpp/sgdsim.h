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

// Desk-scale clipped noisy SGD on multinomial logistic regression.

#ifndef SRPP_SGDSIM_H_
#define SRPP_SGDSIM_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "srpp/accountant.h"
#include "srpp/calibrate.h"
#include "srpp/caps.h"
#include "srpp/matrix.h"

namespace srpp {

struct LabeledDataset {
  Matrix features;
  std::vector<int32_t> labels;
  int num_classes = 2;

  size_t size() const { return labels.size(); }
  size_t dim() const { return features.cols(); }
  absl::Status Validate() const;
};

// Gaussian class clusters: class c is centred at `separation` times a random
// unit vector, features add N(0, I). Labels are uniform; a `label_noise`
// fraction of them is then redrawn uniformly.
LabeledDataset MakeSyntheticLogistic(size_t n, size_t d, int num_classes,
                                     double separation, uint64_t seed,
                                     double label_noise = 0.0);

// Two label vectors differing only in the prevalence of `secret_class`:
// base -> y0 with floor(p_low n) secret labels, then y0 -> y1 with
// floor(p_high n), each by a minimal number of random relabelings.
// Rows [0, first) and [first, n) as two datasets with the same class count.
absl::StatusOr<std::pair<LabeledDataset, LabeledDataset>> SplitDataset(
    const LabeledDataset& data, size_t first);

struct TwoWorldPair {
  std::vector<int32_t> y0;
  std::vector<int32_t> y1;
  int64_t edit_count = 0;
  double p_low = 0.0;
  double p_high = 0.0;
  int32_t secret_class = 0;
};

absl::StatusOr<TwoWorldPair> BuildTwoWorld(std::span<const int32_t> labels,
                                           int32_t secret_class, int num_classes,
                                           double p_low, double p_high,
                                           uint64_t seed);

// Scales g by min(1, C/||g||); the zero vector is left unchanged.
void ClipGradientInPlace(std::span<double> g, double clip);
std::vector<double> ClipGradient(std::span<const double> g, double clip);

// Parameters are num_classes blocks of (d weights, 1 bias).
size_t LogisticParamCount(size_t d, int num_classes);

// Cross-entropy loss of one example; writes its gradient into `grad` when
// nonempty.
double LogisticLossAndGradient(std::span<const double> params,
                               std::span<const double> x, int32_t label,
                               int num_classes, std::span<double> grad);

struct Trajectory {
  std::vector<std::vector<double>> iterates;  // T + 1 parameter vectors
  std::vector<double> losses;                 // mean batch loss per step
  uint64_t seed = 0;
  SgdHyper hyper;
  NoiseSpec noise;
  size_t dim = 0;
  int num_classes = 2;
  double max_clipped_norm = 0.0;

  const std::vector<double>& final_params() const { return iterates.back(); }
};

// Per step: draw a batch, clip per-example gradients at C, average, add
// N(0, sigma2 I) and step xi_t = xi_{t-1} - eta_t (g + N) with eta_t taken
// from hyper.lipschitz. Batch draws use stream (seed, 2t), noise (seed, 2t+1).
absl::StatusOr<Trajectory> RunSgd(const LabeledDataset& data,
                                  const SgdHyper& hyper,
                                  const SubsamplingSpec& sub,
                                  const NoiseSpec& noise, uint64_t seed);

// One step of the HUC inequality on coupled worlds sharing the history and
// the batch: ||update(y0) - update(y1)|| against 2 eta C K / B.
struct CoupledShift {
  int iteration = 0;
  int64_t batch = 0;
  int64_t realized_k = 0;
  double shift_norm = 0.0;
  double bound = 0.0;
};

// Trains on y0 and, at every step, also evaluates the update the y1 labels
// would have produced from the same iterate and batch.
absl::StatusOr<std::vector<CoupledShift>> CoupledShiftTrace(
    const Matrix& features, std::span<const int32_t> y0,
    std::span<const int32_t> y1, int num_classes, const SgdHyper& hyper,
    const SubsamplingSpec& sub, const NoiseSpec& noise, uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::vector<double> per_example_losses;
};

absl::StatusOr<EvalResult> Evaluate(std::span<const double> params,
                                    const LabeledDataset& test);
absl::StatusOr<EvalResult> Evaluate(const Trajectory& trajectory,
                                    const LabeledDataset& test);

}  // namespace srpp

#endif  // SRPP_SGDSIM_H_
