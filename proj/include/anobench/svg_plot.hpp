#pragma once

#include <optional>
#include <string>

#include "anobench/dataset.hpp"
#include "anobench/injector.hpp"

namespace anobench {

struct PlotOptions {
    std::string x_attr;
    std::string y_attr;
    std::optional<std::string> color_attr;  // categorical marker colour
    int width = 800;
    int height = 600;
};

// Scatter plot of two continuous attributes as an SVG document. Cases named
// in the ground truth are drawn as enlarged markers coloured by anomaly
// type; the legend always lists all six types. Output is deterministic for
// fixed input (fixed coordinate precision, no timestamps).
std::string render_scatter(const Dataset& dataset, const GroundTruth& truth,
                           const PlotOptions& options);

}  // namespace anobench
