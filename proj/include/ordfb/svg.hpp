#pragma once

// Self-contained SVG line charts, written directly as text. Used for eval
// curves: one polyline per series, axes with tick labels, and a legend.

#include <string>
#include <utility>
#include <vector>

namespace ordfb {

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y), stays input order
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 840;
    int height = 520;
};

std::string line_chart_svg(const ChartSpec& spec,
                           const std::vector<ChartSeries>& series);

}  // namespace ordfb
