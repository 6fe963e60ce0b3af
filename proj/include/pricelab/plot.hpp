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


// SVG price-trajectory charts with dashed competitive/monopoly reference lines.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pricelab/engine.hpp"

namespace pricelab::plot {

struct ChartOptions {
  std::string title;
  int width = 720;
  int height = 400;
};

std::string price_chart_svg(const engine::RunLog& log, const std::vector<std::string>& labels,
                            double p_competitive, double p_monopoly, const ChartOptions& opts = {});

void write_price_chart(const std::filesystem::path& file, const engine::RunLog& log,
                       const std::vector<std::string>& labels, double p_competitive,
                       double p_monopoly, const ChartOptions& opts = {});

}  // namespace pricelab::plot
