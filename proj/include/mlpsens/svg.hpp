#pragma once

#include "mlpsens/plots.hpp"

#include <string>

namespace mlpsens {

/// Standalone SVG 1.1 document with axes, ticks, labels and a legend. Output
/// bytes depend only on the arguments. Facets are stacked vertically, each
/// with its own axis ranges. An empty plot renders a placeholder.
/// Throws ValidationError for dimensions below 100 px or invalid plot data.
std::string render_svg(const PlotData& plot, double width_px = 800,
                       double height_px = 600);

}  // namespace mlpsens
