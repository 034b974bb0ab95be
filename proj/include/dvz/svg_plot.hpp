#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dvz/stats.hpp"

namespace dvz {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Fit in plotted coordinates (logs on log axes); drawn over the x range
  // of the series and quoted in the legend.
  std::optional<LinearFit> fit;
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::string slope_symbol = "α";
  std::vector<PlotSeries> series;
};

// Scatter plot with optional fitted lines, as a standalone SVG document.
// The output depends only on the data. Points that cannot be placed on a log
// axis are dropped. Throws InputError when fewer than two points remain.
std::string render_svg(const PlotData& plot);

void write_svg(const PlotData& plot, const std::string& path);

}  // namespace dvz
