#pragma once

#include <cmath>
#include <vector>

namespace scenoforge {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

using Polyline = std::vector<Point>;

inline double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

double arc_length(const Polyline& line);

// Heading of the vector a->b in degrees, in [0, 360). 0 points along +x,
// angles grow counterclockwise (mathematical convention).
double heading_deg(const Point& a, const Point& b);

// Signed difference (to - from) normalized into (-180, 180]. Positive means
// a counterclockwise (left) deflection.
double heading_delta_deg(double from_deg, double to_deg);

// Direction of the first / last segment of a polyline, degrees in [0, 360).
double start_heading_deg(const Polyline& line);
double end_heading_deg(const Polyline& line);

// Sum of signed turn angles along the polyline. Positive = net left curve.
double total_turn_deg(const Polyline& line);

// Parallel offset to the right of the direction of travel (right-hand
// traffic). Vertices use mitered joins, capped to avoid spikes at sharp
// corners. The input must have >= 2 points.
Polyline offset_right(const Polyline& line, double offset);

// Point at `pos` meters along the polyline, clamped to its ends.
Point point_along(const Polyline& line, double pos);

// Convex hull (counterclockwise, no repeated closing point). Collinear
// inputs give back a degenerate hull of <= 2 points.
Polyline convex_hull(std::vector<Point> points);

// True if segments ab and cd properly intersect (crossing interiors, not
// merely touching at shared endpoints).
bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d);

}  // namespace scenoforge
