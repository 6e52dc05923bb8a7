#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace afcsim {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double width = 720.0;
    double height = 420.0;
};

// Self-contained SVG line plot. Output depends only on the data.
std::string svg_line_plot(const std::vector<Series>& series, const PlotSpec& spec);

// 8-bit RGB PNG of a row-major matrix, first row at the bottom, mapped
// through a perceptual colour ramp between vmin and vmax.
std::string png_heatmap(const std::vector<double>& values, std::size_t rows, std::size_t cols, double vmin,
                        double vmax);

} // namespace afcsim
