#pragma once

#include <string>
#include <vector>

namespace conslab {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool markers = true;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 640, height = 420;
};

/// Static line chart as a standalone SVG document.
std::string svg_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace conslab
