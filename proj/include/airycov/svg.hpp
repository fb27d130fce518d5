#pragma once

// Self-contained SVG 1.1 line/scatter charts on a fixed 800x600 viewBox.

#include <optional>
#include <string>
#include <vector>

namespace airycov {

struct ChartSeries {
  enum class Style { Line, Points };

  std::string label;
  Style style = Style::Line;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  std::optional<std::vector<double>> error;  // symmetric error bars, Points only
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_log = false;
};

/// Renders the chart. Non-finite points (and non-positive ones on log axes)
/// are dropped; each Line series becomes one polyline.
std::string render_svg(const ChartSpec& spec, const std::vector<ChartSeries>& series);

}  // namespace airycov
