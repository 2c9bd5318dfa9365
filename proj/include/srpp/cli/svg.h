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

#ifndef SRPP_CLI_SVG_H_
#define SRPP_CLI_SVG_H_

#include <span>
#include <string>
#include <vector>

namespace srpp::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-finite points are skipped
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

// Minimal line chart: frame, min/max tick labels, one polyline per series.
std::string LineChartSvg(const ChartSpec& spec, std::span<const Series> series);

}  // namespace srpp::cli

#endif  // SRPP_CLI_SVG_H_
