// Copyright 2026 The pacguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace pacguard::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  std::string color = "#888888";
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  // Axis ranges; equal bounds mean "fit the data".
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  bool equal_aspect = false;
  std::vector<Series> series;
  std::vector<Circle> circles;
};

/// Minimal self-contained SVG line plot.
std::string render_svg(const Plot& plot);

}  // namespace pacguard::cli
