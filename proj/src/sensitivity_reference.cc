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

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "srpp/sensitivity.h"

namespace srpp::reference {

absl::StatusOr<SensitivityProfile> BuildProfileSerial(
    const ScenarioDataset& data, const SliceProfile& profile,
    const SensitivityOptions& options) {
  if (profile.size() == 0) {
    return absl::InvalidArgumentError("empty direction set");
  }
  auto rho = EffectiveRho(data, profile.size(), options);
  if (!rho.ok()) return rho.status();
  std::vector<double> per_slice;
  per_slice.reserve(profile.size());
  for (size_t l = 0; l < profile.size(); ++l) {
    auto v = PerSliceSensitivity(data, profile.direction(l), options.mode, *rho);
    if (!v.ok()) {
      return absl::Status(v.status().code(), absl::StrCat("direction ", l, ": ",
                                                          v.status().message()));
    }
    per_slice.push_back(*v);
  }
  return MakeSensitivityProfile(
      std::move(per_slice),
      std::vector<double>(profile.weights().begin(), profile.weights().end()),
      profile.iid_sampled(), options.delta0, options.mode, *rho);
}

}  // namespace srpp::reference
