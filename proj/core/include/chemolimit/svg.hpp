#pragma once

#include <string>
#include <vector>

#include "chemolimit/analysis.hpp"

namespace chemolimit {

struct PlotSeries {
  std::string label;
  std::vector<std::vector<Point>> paths;  ///< each path is drawn as one polyline
  std::string color = "#1f77b4";
  bool markers = false;  ///< circles at the vertices instead of a line
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool equal_aspect = false;
  /// Fixed data window; an empty window (min >= max) is fitted to the data.
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  std::vector<std::string> notes;  ///< text lines under the title
  std::vector<PlotSeries> series;
};

/// Standalone SVG document. Log axes require positive coordinates; others are dropped.
std::string render_svg(const PlotSpec& spec);

/// Log-log metric-vs-eps plot with the fitted line and its slope annotated.
std::string rate_plot(const std::string& title, const ConvergenceFit& fit);

}  // namespace chemolimit
