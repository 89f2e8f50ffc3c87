#pragma once

#include <span>
#include <string>
#include <vector>

namespace ase {

struct PlotSeries {
    std::string name;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    /// x of sample i is x0 + i * dx.
    double x0{1.0};
    double dx{1.0};
    std::vector<PlotSeries> series;
};

/// Self-contained SVG rendering of a line plot. Series longer than
/// `max_points` are decimated by striding. Output depends only on the input.
[[nodiscard]] std::string render_svg(const LinePlot& plot, std::size_t max_points = 1200);

}  // namespace ase
