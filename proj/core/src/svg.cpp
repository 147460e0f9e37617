#include "scenoforge/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "scenoforge/util.hpp"
#include "scenoforge/xml.hpp"

namespace scenoforge {

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::max();
  double min_y = std::numeric_limits<double>::max();
  double max_x = std::numeric_limits<double>::lowest();
  double max_y = std::numeric_limits<double>::lowest();

  void include(const Point& p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
};

}  // namespace

std::string render_svg(const CompiledNetwork& net, double lane_width) {
  Bounds bounds;
  for (const CompiledEdge& edge : net.edges) {
    for (const Lane& lane : edge.lanes) {
      for (const Point& p : lane.shape) bounds.include(p);
    }
  }
  for (const Junction& junction : net.junctions) {
    bounds.include(junction.pos);
    for (const Point& p : junction.shape) bounds.include(p);
  }
  const double margin = 2.0 * lane_width;
  const double width = bounds.max_x - bounds.min_x + 2.0 * margin;
  const double height = bounds.max_y - bounds.min_y + 2.0 * margin;
  // SVG y grows downward; network y grows upward.
  auto sx = [&](double x) { return format_fixed(x - bounds.min_x + margin); };
  auto sy = [&](double y) { return format_fixed(bounds.max_y - y + margin); };
  auto points_of = [&](const Polyline& line) {
    std::string out;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out.push_back(' ');
      out += fmt::format("{},{}", sx(line[i].x), sy(line[i].y));
    }
    return out;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n",
      format_fixed(width), format_fixed(height));
  svg += fmt::format("  <rect width=\"{}\" height=\"{}\" fill=\"#f5f5f0\"/>\n",
                     format_fixed(width), format_fixed(height));
  for (const Junction& junction : net.junctions) {
    if (junction.shape.empty()) continue;
    svg += fmt::format(
        "  <polygon class=\"junction\" points=\"{}\" fill=\"#c8c8c8\" "
        "stroke=\"#909090\" stroke-width=\"0.40\"/>\n",
        points_of(junction.shape));
  }
  for (const CompiledEdge& edge : net.edges) {
    for (const Lane& lane : edge.lanes) {
      svg += fmt::format(
          "  <polyline class=\"lane\" points=\"{}\" fill=\"none\" "
          "stroke=\"#3c3c3c\" stroke-width=\"{}\" stroke-linecap=\"butt\"/>\n",
          points_of(lane.shape), format_fixed(lane_width));
    }
  }
  for (const CompiledEdge& edge : net.edges) {
    const Lane& lane = edge.lanes.front();
    const Point mid = point_along(lane.shape, lane.length / 2.0);
    svg += fmt::format(
        "  <text class=\"edge-label\" x=\"{}\" y=\"{}\" font-size=\"4.00\" "
        "fill=\"#202020\">{}</text>\n",
        sx(mid.x), sy(mid.y), xml::escape_attribute(edge.id));
  }
  svg += "</svg>\n";
  return svg;
}

void render_svg_file(const CompiledNetwork& net, const std::string& path,
                     double lane_width) {
  write_file(path, render_svg(net, lane_width));
}

}  // namespace scenoforge
