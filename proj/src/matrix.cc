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

#include "srpp/matrix.h"

#include <cmath>

#include "absl/status/status.h"

namespace srpp {

absl::StatusOr<Matrix> Matrix::FromRows(
    const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) {
    if (!m.empty() && r.size() != m.cols_) {
      return absl::InvalidArgumentError("ragged rows in matrix");
    }
    m.AppendRow(r);
  }
  return m;
}

void Matrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0) cols_ = values.size();
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

}  // namespace srpp
