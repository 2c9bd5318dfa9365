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

#include "srpp/sgdsim.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "srpp/rng.h"

namespace srpp {
namespace {

// Uniformly random k-subset of `pool`, in random order.
std::vector<size_t> PickRandom(std::vector<size_t> pool, size_t k, Rng& rng) {
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.UniformInt(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

absl::Status Relabel(std::vector<int32_t>& y, int32_t secret, int num_classes,
                     int64_t target, Rng& rng) {
  std::vector<size_t> in, out;
  for (size_t i = 0; i < y.size(); ++i) (y[i] == secret ? in : out).push_back(i);
  const auto have = static_cast<int64_t>(in.size());
  if (have < target) {
    const auto need = static_cast<size_t>(target - have);
    if (need > out.size()) {
      return absl::InvalidArgumentError("not enough records to raise prevalence");
    }
    for (size_t i : PickRandom(std::move(out), need, rng)) y[i] = secret;
  } else if (have > target) {
    if (num_classes < 2) {
      return absl::InvalidArgumentError("need a non-secret class to relabel into");
    }
    const auto drop = static_cast<size_t>(have - target);
    for (size_t i : PickRandom(std::move(in), drop, rng)) {
      auto c = static_cast<int32_t>(rng.UniformInt(static_cast<uint64_t>(num_classes - 1)));
      if (c >= secret) ++c;
      y[i] = c;
    }
  }
  return absl::OkStatus();
}

int64_t FloorCount(double p, size_t n) {
  // Guard against p * n landing a hair below an integer.
  return static_cast<int64_t>(std::floor(p * static_cast<double>(n) + 1e-9));
}

void Softmax(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    s += v;
  }
  for (double& v : z) v /= s;
}

// Mean clipped gradient over `batch` (and mean unclipped loss).
double BatchGradient(std::span<const double> params, const Matrix& features,
                     std::span<const int32_t> labels, int num_classes,
                     std::span<const int64_t> batch, double clip,
                     std::vector<double>& mean_grad, std::vector<double>& scratch,
                     double* max_norm) {
  std::fill(mean_grad.begin(), mean_grad.end(), 0.0);
  double loss = 0.0;
  for (int64_t idx : batch) {
    const auto i = static_cast<size_t>(idx);
    loss += LogisticLossAndGradient(params, features.row(i), labels[i],
                                    num_classes, scratch);
    ClipGradientInPlace(scratch, clip);
    if (max_norm != nullptr) *max_norm = std::max(*max_norm, Norm2(scratch));
    for (size_t k = 0; k < scratch.size(); ++k) mean_grad[k] += scratch[k];
  }
  const double B = static_cast<double>(batch.size());
  for (double& g : mean_grad) g /= B;
  return loss / B;
}

absl::Status CheckLabels(std::span<const int32_t> labels, int num_classes) {
  for (int32_t y : labels) {
    if (y < 0 || y >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", y, " outside [0, ", num_classes, ")"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status LabeledDataset::Validate() const {
  if (features.rows() != labels.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset has ", features.rows(), " feature rows and ", labels.size(),
        " labels"));
  }
  if (num_classes < 2) return absl::InvalidArgumentError("need >= 2 classes");
  for (double v : features.data()) {
    if (!std::isfinite(v)) return absl::InvalidArgumentError("non-finite feature");
  }
  return CheckLabels(labels, num_classes);
}

LabeledDataset MakeSyntheticLogistic(size_t n, size_t d, int num_classes,
                                     double separation, uint64_t seed,
                                     double label_noise) {
  Rng centre_rng(seed, 0);
  Matrix centres(static_cast<size_t>(num_classes), d);
  for (int c = 0; c < num_classes; ++c) {
    auto row = centres.row(static_cast<size_t>(c));
    for (double& x : row) x = centre_rng.Normal();
    const double norm = Norm2(row);
    for (double& x : row) x *= separation / norm;
  }
  LabeledDataset data;
  data.num_classes = num_classes;
  data.features = Matrix(n, d);
  data.labels.resize(n);
  Rng rng(seed, 1);
  for (size_t i = 0; i < n; ++i) {
    const auto y = static_cast<int32_t>(rng.UniformInt(static_cast<uint64_t>(num_classes)));
    auto row = data.features.row(i);
    for (size_t j = 0; j < d; ++j) row[j] = centres(static_cast<size_t>(y), j) + rng.Normal();
    data.labels[i] = y;
    if (label_noise > 0.0 && rng.Bernoulli(label_noise)) {
      data.labels[i] =
          static_cast<int32_t>(rng.UniformInt(static_cast<uint64_t>(num_classes)));
    }
  }
  return data;
}

absl::StatusOr<std::pair<LabeledDataset, LabeledDataset>> SplitDataset(
    const LabeledDataset& data, size_t first) {
  if (first > data.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("split point ", first, " beyond ", data.size(), " rows"));
  }
  LabeledDataset head, tail;
  head.num_classes = tail.num_classes = data.num_classes;
  head.features = Matrix(first, data.dim());
  tail.features = Matrix(data.size() - first, data.dim());
  for (size_t i = 0; i < data.size(); ++i) {
    LabeledDataset& part = i < first ? head : tail;
    const size_t r = i < first ? i : i - first;
    std::copy_n(data.features.row(i).begin(), data.dim(), part.features.row(r).begin());
    part.labels.push_back(data.labels[i]);
  }
  return std::make_pair(std::move(head), std::move(tail));
}

absl::StatusOr<TwoWorldPair> BuildTwoWorld(std::span<const int32_t> labels,
                                           int32_t secret_class, int num_classes,
                                           double p_low, double p_high,
                                           uint64_t seed) {
  if (!(p_low >= 0.0 && p_low <= 1.0 && p_high >= 0.0 && p_high <= 1.0)) {
    return absl::InvalidArgumentError("prevalences must lie in [0,1]");
  }
  if (secret_class < 0 || secret_class >= num_classes) {
    return absl::InvalidArgumentError("secret class outside label range");
  }
  if (absl::Status s = CheckLabels(labels, num_classes); !s.ok()) return s;
  const int64_t n0 = FloorCount(p_low, labels.size());
  const int64_t n1 = FloorCount(p_high, labels.size());
  Rng rng(seed);
  TwoWorldPair w;
  w.y0.assign(labels.begin(), labels.end());
  if (absl::Status s = Relabel(w.y0, secret_class, num_classes, n0, rng); !s.ok()) {
    return s;
  }
  w.y1 = w.y0;
  if (absl::Status s = Relabel(w.y1, secret_class, num_classes, n1, rng); !s.ok()) {
    return s;
  }
  w.edit_count = 0;
  for (size_t i = 0; i < w.y0.size(); ++i) w.edit_count += w.y0[i] != w.y1[i];
  w.p_low = p_low;
  w.p_high = p_high;
  w.secret_class = secret_class;
  return w;
}

void ClipGradientInPlace(std::span<double> g, double clip) {
  const double norm = Norm2(g);
  if (norm <= clip || norm == 0.0) return;
  const double scale = clip / norm;
  for (double& v : g) v *= scale;
}

std::vector<double> ClipGradient(std::span<const double> g, double clip) {
  std::vector<double> out(g.begin(), g.end());
  ClipGradientInPlace(out, clip);
  return out;
}

size_t LogisticParamCount(size_t d, int num_classes) {
  return static_cast<size_t>(num_classes) * (d + 1);
}

double LogisticLossAndGradient(std::span<const double> params,
                               std::span<const double> x, int32_t label,
                               int num_classes, std::span<double> grad) {
  const size_t d = x.size();
  const size_t k = static_cast<size_t>(num_classes);
  std::vector<double> logits(k);
  for (size_t c = 0; c < k; ++c) {
    const auto w = params.subspan(c * (d + 1), d);
    logits[c] = Dot(w, x) + params[c * (d + 1) + d];
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double lse = 0.0;
  for (double z : logits) lse += std::exp(z - top);
  const double loss = top + std::log(lse) - logits[static_cast<size_t>(label)];
  if (!grad.empty()) {
    Softmax(logits);
    for (size_t c = 0; c < k; ++c) {
      const double r = logits[c] - (static_cast<size_t>(label) == c ? 1.0 : 0.0);
      for (size_t j = 0; j < d; ++j) grad[c * (d + 1) + j] = r * x[j];
      grad[c * (d + 1) + d] = r;
    }
  }
  return std::max(loss, 0.0);
}

absl::StatusOr<Trajectory> RunSgd(const LabeledDataset& data,
                                  const SgdHyper& hyper,
                                  const SubsamplingSpec& sub,
                                  const NoiseSpec& noise, uint64_t seed) {
  if (absl::Status s = data.Validate(); !s.ok()) return s;
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;
  if (hyper.lipschitz.empty()) {
    return absl::InvalidArgumentError("SGD run needs a step-size schedule in lipschitz");
  }
  if (sub.population != static_cast<int64_t>(data.size())) {
    return absl::InvalidArgumentError("subsampling population != dataset size");
  }
  if (!(noise.sigma2 >= 0.0)) return absl::InvalidArgumentError("sigma2 must be >= 0");
  const size_t p = LogisticParamCount(data.dim(), data.num_classes);
  if (noise.dim != 0 && noise.dim != p) {
    return absl::InvalidArgumentError("noise dimension != parameter count");
  }

  Trajectory tr;
  tr.seed = seed;
  tr.hyper = hyper;
  tr.noise = NoiseSpec{noise.sigma2, p};
  tr.dim = data.dim();
  tr.num_classes = data.num_classes;
  tr.iterates.reserve(static_cast<size_t>(hyper.iterations) + 1);
  tr.iterates.emplace_back(p, 0.0);

  std::vector<double> grad(p), scratch(p);
  const double sd = std::sqrt(noise.sigma2);
  for (int t = 0; t < hyper.iterations; ++t) {
    Rng batch_rng(seed, 2 * static_cast<uint64_t>(t));
    Rng noise_rng(seed, 2 * static_cast<uint64_t>(t) + 1);
    const std::vector<int64_t> batch = Subsample(sub, batch_rng);
    const std::vector<double>& prev = tr.iterates.back();
    const double loss = BatchGradient(prev, data.features, data.labels,
                                      data.num_classes, batch, hyper.clip, grad,
                                      scratch, &tr.max_clipped_norm);
    const double eta = hyper.LipschitzAt(t);
    std::vector<double> next(prev);
    for (size_t k = 0; k < p; ++k) {
      const double g = sd > 0.0 ? grad[k] + sd * noise_rng.Normal() : grad[k];
      next[k] -= eta * g;
    }
    tr.losses.push_back(loss);
    tr.iterates.push_back(std::move(next));
  }
  return tr;
}

absl::StatusOr<std::vector<CoupledShift>> CoupledShiftTrace(
    const Matrix& features, std::span<const int32_t> y0,
    std::span<const int32_t> y1, int num_classes, const SgdHyper& hyper,
    const SubsamplingSpec& sub, const NoiseSpec& noise, uint64_t seed) {
  if (y0.size() != features.rows() || y1.size() != features.rows()) {
    return absl::InvalidArgumentError("label vectors differ from feature rows");
  }
  if (absl::Status s = CheckLabels(y0, num_classes); !s.ok()) return s;
  if (absl::Status s = CheckLabels(y1, num_classes); !s.ok()) return s;
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;
  if (hyper.lipschitz.empty()) {
    return absl::InvalidArgumentError("SGD run needs a step-size schedule in lipschitz");
  }
  const size_t p = LogisticParamCount(features.cols(), num_classes);
  std::vector<double> params(p, 0.0), g0(p), g1(p), scratch(p);
  const double sd = std::sqrt(noise.sigma2);
  std::vector<CoupledShift> trace;
  for (int t = 0; t < hyper.iterations; ++t) {
    Rng batch_rng(seed, 2 * static_cast<uint64_t>(t));
    Rng noise_rng(seed, 2 * static_cast<uint64_t>(t) + 1);
    const std::vector<int64_t> batch = Subsample(sub, batch_rng);
    BatchGradient(params, features, y0, num_classes, batch, hyper.clip, g0,
                  scratch, nullptr);
    BatchGradient(params, features, y1, num_classes, batch, hyper.clip, g1,
                  scratch, nullptr);
    const double eta = hyper.LipschitzAt(t);
    CoupledShift c;
    c.iteration = t;
    c.batch = static_cast<int64_t>(batch.size());
    for (int64_t j : batch) c.realized_k += y0[static_cast<size_t>(j)] != y1[static_cast<size_t>(j)];
    double s = 0.0;
    for (size_t k = 0; k < p; ++k) {
      const double diff = eta * (g0[k] - g1[k]);
      s += diff * diff;
    }
    c.shift_norm = std::sqrt(s);
    c.bound = 2.0 * eta * hyper.clip * static_cast<double>(c.realized_k) /
              static_cast<double>(c.batch);
    trace.push_back(c);
    for (size_t k = 0; k < p; ++k) {
      const double g = sd > 0.0 ? g0[k] + sd * noise_rng.Normal() : g0[k];
      params[k] -= eta * g;
    }
  }
  return trace;
}

absl::StatusOr<EvalResult> Evaluate(std::span<const double> params,
                                    const LabeledDataset& test) {
  if (test.size() == 0) return absl::InvalidArgumentError("empty test set");
  if (absl::Status s = test.Validate(); !s.ok()) return s;
  const size_t d = test.dim();
  const auto k = static_cast<size_t>(test.num_classes);
  if (params.size() != LogisticParamCount(d, test.num_classes)) {
    return absl::InvalidArgumentError("parameter count does not match test data");
  }
  EvalResult r;
  r.per_example_losses.reserve(test.size());
  size_t correct = 0;
  for (size_t i = 0; i < test.size(); ++i) {
    const auto x = test.features.row(i);
    const double loss =
        LogisticLossAndGradient(params, x, test.labels[i], test.num_classes, {});
    r.per_example_losses.push_back(loss);
    r.mean_loss += loss;
    size_t best = 0;
    double best_logit = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < k; ++c) {
      const double z = Dot(params.subspan(c * (d + 1), d), x) + params[c * (d + 1) + d];
      if (z > best_logit) {
        best_logit = z;
        best = c;
      }
    }
    correct += static_cast<int32_t>(best) == test.labels[i];
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  r.mean_loss /= static_cast<double>(test.size());
  return r;
}

absl::StatusOr<EvalResult> Evaluate(const Trajectory& trajectory,
                                    const LabeledDataset& test) {
  if (test.dim() != trajectory.dim || test.num_classes != trajectory.num_classes) {
    return absl::InvalidArgumentError("trajectory and test data disagree in shape");
  }
  return Evaluate(trajectory.final_params(), test);
}

}  // namespace srpp
