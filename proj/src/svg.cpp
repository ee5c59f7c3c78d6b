#include "averify/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace averify {

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart_svg(const ChartSpec& spec,
                           const std::vector<ChartSeries>& series) {
  const double left = 70, right = 170, top = 40, bottom = 60;
  const double plot_w = spec.width - left - right;
  const double plot_h = spec.height - top - bottom;

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  const double y_span = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) {
    return top + plot_h - (y - spec.y_min) / y_span * plot_h;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      spec.width, spec.height, spec.width, spec.height);
  svg += fmt::format(
      "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", spec.width,
      spec.height);
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}"
      "</text>\n",
      left + plot_w / 2, escape(spec.title));

  // Axes.
  svg += fmt::format(
      "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
      "stroke=\"black\"/>\n",
      left, top + plot_h, left + plot_w);
  svg += fmt::format(
      "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" "
      "stroke=\"black\"/>\n",
      left, top, top + plot_h);
  for (int i = 0; i <= 5; ++i) {
    const double y = spec.y_min + y_span * i / 5.0;
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
        "stroke=\"#dddddd\"/>\n"
        "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\">{5:.2f}</text>\n",
        left, py(y), left + plot_w, left - 6, py(y) + 4, y);
  }
  const int x_ticks = static_cast<int>(std::min(10.0, x_max - x_min));
  for (int i = 0; i <= x_ticks; ++i) {
    const double x = x_min + (x_max - x_min) * i / std::max(1, x_ticks);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:g}</text>\n",
        px(x), top + plot_h + 18, x);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
      left + plot_w / 2, spec.height - 16.0, escape(spec.x_label));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
      top + plot_h / 2, escape(spec.y_label));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % kPalette.size()];
    if (!s.markers_only && !s.points.empty()) {
      std::string pts;
      for (const auto& [x, y] : s.points) {
        pts += fmt::format("{:.1f},{:.1f} ", px(x), py(y));
      }
      pts.pop_back();
      svg += fmt::format(
          "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{} "
          "points=\"{}\"/>\n",
          color, s.dashed ? " stroke-dasharray=\"6 4\"" : "", pts);
    } else {
      for (const auto& [x, y] : s.points) {
        svg += fmt::format(
            "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"none\" "
            "stroke=\"{}\"/>\n",
            px(x), py(y), color);
      }
    }
    const double ly = top + 16.0 * static_cast<double>(i) + 8;
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
        "stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4:.1f}\" y=\"{5:.1f}\">{6}</text>\n",
        left + plot_w + 12, ly, left + plot_w + 32, color, left + plot_w + 38,
        ly + 4, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace averify
