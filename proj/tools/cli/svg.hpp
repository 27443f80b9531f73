#pragma once

#include <string>
#include <vector>

namespace pce::cli {

/// Single-series line chart: axes, min/max tick labels and one polyline.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<double>& ys);

}  // namespace pce::cli
