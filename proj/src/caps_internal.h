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

#ifndef SRPP_SRC_CAPS_INTERNAL_H_
#define SRPP_SRC_CAPS_INTERNAL_H_

#include "srpp/caps.h"

namespace srpp::internal {

// Replicate r of the Monte-Carlo cap procedure on stream (seed, r).
inline absl::StatusOr<int64_t> McReplicate(const PairedSampler& sampler,
                                           const SubsamplingSpec& sub,
                                           uint64_t seed, int64_t r) {
  Rng rng(seed, static_cast<uint64_t>(r));
  const CoupledPair pair = sampler(rng);
  if (static_cast<int64_t>(pair.x.size()) != sub.population) {
    return absl::InvalidArgumentError(
        "sampler produced datasets of the wrong size");
  }
  const std::vector<int64_t> idx = Subsample(sub, rng);
  return DiscrepancyCount<int32_t>(pair.x, pair.x_prime, idx);
}

}  // namespace srpp::internal

#endif  // SRPP_SRC_CAPS_INTERNAL_H_
