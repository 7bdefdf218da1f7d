#pragma once

#include <string>
#include <vector>

namespace afdmsense {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

// Render a standalone SVG line chart. Points with non-finite coordinates
// (and, on a log axis, y <= 0) are skipped. Series colors cycle through a
// fixed palette; a legend is drawn when any label is non-empty.
std::string render_line_plot(const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series,
                             bool log_y = false);

}  // namespace afdmsense
