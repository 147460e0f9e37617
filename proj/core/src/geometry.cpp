#include "scenoforge/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace scenoforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_deg(double rad) { return rad * 180.0 / kPi; }

Point unit_right_normal(const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len <= 0.0) return {0.0, 0.0};
  // Right of travel direction for y-up coordinates.
  return {dy / len, -dx / len};
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

double arc_length(const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    total += distance(line[i - 1], line[i]);
  }
  return total;
}

double heading_deg(const Point& a, const Point& b) {
  double deg = to_deg(std::atan2(b.y - a.y, b.x - a.x));
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

double heading_delta_deg(double from_deg, double to_deg_) {
  double delta = std::fmod(to_deg_ - from_deg, 360.0);
  if (delta <= -180.0) delta += 360.0;
  if (delta > 180.0) delta -= 360.0;
  return delta;
}

double start_heading_deg(const Polyline& line) {
  for (std::size_t i = 1; i < line.size(); ++i) {
    if (distance(line[0], line[i]) > 0.0) return heading_deg(line[0], line[i]);
  }
  return 0.0;
}

double end_heading_deg(const Polyline& line) {
  for (std::size_t i = line.size(); i-- > 1;) {
    if (distance(line[i - 1], line.back()) > 0.0 || i == 1) {
      return heading_deg(line[i - 1], line.back());
    }
  }
  return 0.0;
}

double total_turn_deg(const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 2; i < line.size(); ++i) {
    const double h0 = heading_deg(line[i - 2], line[i - 1]);
    const double h1 = heading_deg(line[i - 1], line[i]);
    total += heading_delta_deg(h0, h1);
  }
  return total;
}

Polyline offset_right(const Polyline& line, double offset) {
  Polyline out;
  if (line.size() < 2) return line;
  out.reserve(line.size());
  const double kMiterCap = 3.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    Point n;
    if (i == 0) {
      n = unit_right_normal(line[0], line[1]);
    } else if (i + 1 == line.size()) {
      n = unit_right_normal(line[i - 1], line[i]);
    } else {
      const Point n0 = unit_right_normal(line[i - 1], line[i]);
      const Point n1 = unit_right_normal(line[i], line[i + 1]);
      n = {n0.x + n1.x, n0.y + n1.y};
      const double len = std::hypot(n.x, n.y);
      if (len < 1e-12) {
        // 180-degree reversal at the vertex; fall back to the incoming normal.
        n = n0;
      } else {
        n = {n.x / len, n.y / len};
        // Miter scale keeps the offset curve at constant distance from both
        // adjacent segments, capped at sharp corners.
        const double cos_half = n.x * n0.x + n.y * n0.y;
        const double scale = std::min(kMiterCap, 1.0 / std::max(cos_half, 1e-6));
        n = {n.x * scale, n.y * scale};
      }
    }
    out.push_back({line[i].x + n.x * offset, line[i].y + n.y * offset});
  }
  return out;
}

Point point_along(const Polyline& line, double pos) {
  if (line.empty()) return {};
  if (pos <= 0.0) return line.front();
  double remaining = pos;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double seg = distance(line[i - 1], line[i]);
    if (remaining <= seg && seg > 0.0) {
      const double t = remaining / seg;
      return {line[i - 1].x + (line[i].x - line[i - 1].x) * t,
              line[i - 1].y + (line[i].y - line[i - 1].y) * t};
    }
    remaining -= seg;
  }
  return line.back();
}

Polyline convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n <= 2) return points;
  Polyline hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace scenoforge
