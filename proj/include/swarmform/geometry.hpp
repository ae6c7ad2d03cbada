#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace swarmform {

// World coordinates in meters, y grows upward.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  Point2 clamp(Point2 p) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

// One candidate swarm layout: robot i sits at positions[i].
struct Formation {
  std::vector<Point2> positions;
  Rect workspace;

  std::size_t size() const { return positions.size(); }

  friend bool operator==(const Formation&, const Formation&) = default;
};

// Throws std::invalid_argument when a position is non-finite or outside the
// workspace, or when the workspace itself is empty.
void validate(const Formation& formation);

struct HullPartition {
  std::vector<std::size_t> hull_indices;  // counter-clockwise
  std::vector<std::size_t> interior_indices;  // ascending
};

enum class Shape { square, triangle, circle, inverted_triangle, hexagon };

inline constexpr Shape kAllShapes[] = {Shape::square, Shape::triangle, Shape::circle,
                                       Shape::inverted_triangle, Shape::hexagon};

std::string_view to_string(Shape shape);

// Signed doubled area of the triangle (o, a, b); positive for a left turn.
inline double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Strict convex hull (monotone chain). Returns vertex indices in
// counter-clockwise order starting at the lexicographically smallest point.
// Points lying on a hull edge, and duplicates of a vertex, are not vertices.
// Throws std::invalid_argument("empty point set") for empty input.
std::vector<std::size_t> convex_hull(std::span<const Point2> points);

HullPartition partition(const Formation& formation);

Point2 nearest_point_on_segment(Point2 p, Point2 a, Point2 b);

// Distance from p to the closed boundary of the polygon given by the ordered
// vertex list.
double distance_to_boundary(Point2 p, std::span<const Point2> polygon);

// Closed point-in-convex-polygon test with an absolute tolerance in meters.
bool inside_convex_polygon(Point2 p, std::span<const Point2> ccw_polygon, double tolerance = 1e-9);

struct ContourProjection {
  Formation formation;
  bool degenerate = false;  // hull had fewer than 3 vertices; formation returned unchanged
};

// Moves every interior robot to its nearest point on the hull boundary.
// Equidistant edges resolve to the lowest edge index.
ContourProjection project_to_contour(const Formation& formation);

// m robots at equal arc-length spacing along a shape outline centered in the
// workspace, starting at the outline's first vertex (angle 0 for the circle).
// With the default fraction the square and the circle span 80% of the smaller
// workspace side; triangles and the hexagon are inscribed in that same circle.
// The inverted triangle is the triangle mirrored about its horizontal
// centroid axis.
Formation predefined_formation(Shape shape, std::size_t m, const Rect& workspace,
                               double fraction = 0.8);

}  // namespace swarmform
