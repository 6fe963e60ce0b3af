// Copyright 2026 The pricelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pricelab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pricelab/errors.hpp"

namespace pricelab::plot {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string price_chart_svg(const engine::RunLog& log, const std::vector<std::string>& labels,
                            double p_competitive, double p_monopoly, const ChartOptions& opts) {
  if (log.periods.empty()) throw ContractViolation("cannot plot an empty run");
  const std::size_t n = log.periods.front().prices.size();

  double lo = std::min(p_competitive, p_monopoly), hi = std::max(p_competitive, p_monopoly);
  for (const auto& r : log.periods)
    for (double p : r.prices) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  const double pad = 0.05 * std::max(hi - lo, 1e-6);
  lo -= pad;
  hi += pad;

  const double left = 60, right = 140, top = 40, bottom = 50;
  const double w = opts.width - left - right, h = opts.height - top - bottom;
  const double periods = std::max<double>(1.0, static_cast<double>(log.periods.size()));
  auto x = [&](double t) { return left + w * (t + 1.0) / periods; };
  auto y = [&](double p) { return top + h * (hi - p) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << escape(opts.title)
        << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double p = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << num(y(p) + 4) << "\" text-anchor=\"end\">"
        << num(p) << "</text>\n";
  }
  svg << "<text x=\"" << left << "\" y=\"" << opts.height - 20 << "\">1</text>\n";
  svg << "<text x=\"" << left + w << "\" y=\"" << opts.height - 20 << "\" text-anchor=\"end\">"
      << log.periods.size() << "</text>\n";
  svg << "<text x=\"" << left + w / 2 << "\" y=\"" << opts.height - 8
      << "\" text-anchor=\"middle\">Period</text>\n";

  auto reference = [&](double p, const char* name) {
    svg << "<line x1=\"" << left << "\" x2=\"" << left + w << "\" y1=\"" << num(y(p))
        << "\" y2=\"" << num(y(p)) << "\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << left + w + 6 << "\" y=\"" << num(y(p) + 4) << "\">" << name << " "
        << num(p) << "</text>\n";
  };
  reference(p_competitive, "p^C");
  reference(p_monopoly, "p^M");

  for (std::size_t i = 0; i < n; ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : log.periods)
      svg << num(x(static_cast<double>(r.t))) << ',' << num(y(r.prices[i])) << ' ';
    svg << "\"/>\n";
    const std::string label = i < labels.size() ? labels[i] : "Seller " + std::to_string(i + 1);
    const double ly = top + 16.0 * static_cast<double>(i) + 60;
    svg << "<text x=\"" << left + w + 6 << "\" y=\"" << ly << "\" fill=\"" << color << "\">"
        << escape(label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_price_chart(const std::filesystem::path& file, const engine::RunLog& log,
                       const std::vector<std::string>& labels, double p_competitive,
                       double p_monopoly, const ChartOptions& opts) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << price_chart_svg(log, labels, p_competitive, p_monopoly, opts);
}

}  // namespace pricelab::plot
