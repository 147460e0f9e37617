#pragma once

#include <string>

#include "scenoforge/net_model.hpp"

namespace scenoforge {

// Bird's-eye view of a network. One polyline per lane (stroke width equals
// the lane width), filled junction polygons, edge ids as labels. Equal
// networks render to identical bytes.
std::string render_svg(const CompiledNetwork& net, double lane_width = 3.2);

void render_svg_file(const CompiledNetwork& net, const std::string& path,
                     double lane_width = 3.2);

}  // namespace scenoforge
