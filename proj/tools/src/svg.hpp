#pragma once

#include "rtd/geometry.hpp"
#include "rtd/persistence.hpp"

#include <string>

namespace rtd::cli {

struct PlotStyle {
    int width = 480;
    int height = 480;
    int margin = 48;
    std::string title;
};

/// First two coordinates, one <circle class="pt"> per row. One-dimensional
/// clouds sit on y = 0.
std::string scatter_svg(const PointCloud& cloud, const PlotStyle& style = {});

/// One horizontal <line class="bar"> per bar, grouped by dimension and sorted
/// by birth. Essential bars run to the right edge and end in an arrowhead.
std::string barcode_svg(const Barcode& barcode, const PlotStyle& style = {});

}  // namespace rtd::cli
