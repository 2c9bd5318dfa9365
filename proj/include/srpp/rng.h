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

#ifndef SRPP_RNG_H_
#define SRPP_RNG_H_

#include <cstdint>

namespace srpp {

// Counter-based generator: the i-th 64-bit output of a stream is a pure
// function of (seed, stream, i). Streams derived from the same seed are
// statistically independent, so parallel work items can each own a stream
// and produce identical results regardless of scheduling.
//
// Normal variates use the Box-Muller transform on 53-bit uniforms so that
// outputs do not depend on the standard library's distribution objects.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint64_t NextU64();
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on (0, 1).
  double UniformOpen();
  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformInt(uint64_t n);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  // Sub-stream keyed by `index`; independent of this generator's position.
  Rng Derive(uint64_t index) const;

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

}  // namespace srpp

#endif  // SRPP_RNG_H_
