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

#include "srpp/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"

namespace srpp::cli {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b"};

std::string Escape(const std::string& s) {
  return absl::StrReplaceAll(s, {{"&", "&amp;"}, {"<", "&lt;"}, {">", "&gt;"}});
}

std::string Num(double v) { return absl::StrFormat("%.4g", v); }

}  // namespace

std::string LineChartSvg(const ChartSpec& spec, std::span<const Series> series) {
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream out;
  out << absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << absl::StrFormat(
      "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);
  out << absl::StrFormat("<text x=\"%g\" y=\"24\" text-anchor=\"middle\" "
                         "font-size=\"14\">%s</text>\n",
                         kWidth / 2, Escape(spec.title));
  out << absl::StrFormat("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                         kLeft + pw / 2, kHeight - 12, Escape(spec.x_label));
  out << absl::StrFormat(
      "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 %g)\">%s</text>\n",
      kTop + ph / 2, kTop + ph / 2, Escape(spec.y_label));
  const double xa = spec.log_x ? std::pow(10.0, x0) : x0;
  const double xb = spec.log_x ? std::pow(10.0, x1) : x1;
  out << absl::StrFormat("<text x=\"%g\" y=\"%g\" text-anchor=\"start\">%s</text>\n",
                         kLeft, kTop + ph + 16, Num(xa));
  out << absl::StrFormat("<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n",
                         kLeft + pw, kTop + ph + 16, Num(xb));
  out << absl::StrFormat("<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n",
                         kLeft - 6, kTop + ph, Num(y0));
  out << absl::StrFormat("<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n",
                         kLeft - 6, kTop + 10, Num(y1));

  for (size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) continue;
      absl::StrAppend(&points, points.empty() ? "" : " ",
                      absl::StrFormat("%.2f,%.2f", px(s.x[i]), py(s.y[i])));
      out << absl::StrFormat("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                             px(s.x[i]), py(s.y[i]), color);
    }
    out << absl::StrFormat(
        "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" points=\"%s\"/>\n",
        color, points);
    out << absl::StrFormat("<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n",
                           kLeft + 8, kTop + 16 + 14.0 * k, color, Escape(s.label));
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace srpp::cli
