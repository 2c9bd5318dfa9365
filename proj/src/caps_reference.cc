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

#include "caps_internal.h"
#include "srpp/caps.h"

namespace srpp::reference {

absl::StatusOr<McCapSample> McCapCountsSerial(const PairedSampler& sampler,
                                              const SubsamplingSpec& sub,
                                              int64_t M, uint64_t seed) {
  if (M < 2) return absl::InvalidArgumentError("Monte-Carlo caps need M >= 2");
  std::vector<int64_t> counts;
  counts.reserve(static_cast<size_t>(M));
  for (int64_t r = 0; r < M; ++r) {
    auto k = internal::McReplicate(sampler, sub, seed, r);
    if (!k.ok()) return k.status();
    counts.push_back(*k);
  }
  std::sort(counts.begin(), counts.end());
  return McCapSample{std::move(counts), sub.MaxBatch()};
}

}  // namespace srpp::reference
