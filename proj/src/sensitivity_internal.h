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

#ifndef SRPP_SRC_SENSITIVITY_INTERNAL_H_
#define SRPP_SRC_SENSITIVITY_INTERNAL_H_

#include <optional>
#include <span>

#include "absl/status/statusor.h"
#include "srpp/sensitivity.h"

namespace srpp::internal {

// 1-D distance between two sorted projected samples for one instance.
absl::StatusOr<double> InstanceDistance(std::span<const double> a,
                                        std::span<const double> b,
                                        SensitivityMode mode,
                                        std::optional<double> rho);

absl::Status AnnotateInstance(const absl::Status& s,
                              const ScenarioInstance& inst);

absl::Status ValidateDirection(const ScenarioDataset& data,
                               std::span<const double> direction);

}  // namespace srpp::internal

#endif  // SRPP_SRC_SENSITIVITY_INTERNAL_H_
