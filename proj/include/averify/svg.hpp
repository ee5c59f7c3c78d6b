#pragma once

// Minimal SVG line chart: axes with ticks, one polyline per series, optional
// point markers and a legend.

#include <string>
#include <utility>
#include <vector>

namespace averify {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers_only = false;
  bool dashed = false;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
  int width = 720;
  int height = 480;
};

std::string line_chart_svg(const ChartSpec& spec,
                           const std::vector<ChartSeries>& series);

}  // namespace averify
