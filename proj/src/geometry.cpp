#include "swarmform/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace swarmform {

Point2 Rect::clamp(Point2 p) const {
  return {std::clamp(p.x, xmin, xmax), std::clamp(p.y, ymin, ymax)};
}

void validate(const Formation& formation) {
  const Rect& ws = formation.workspace;
  if (!(std::isfinite(ws.xmin) && std::isfinite(ws.xmax) && std::isfinite(ws.ymin) &&
        std::isfinite(ws.ymax)) ||
      !(ws.xmax > ws.xmin) || !(ws.ymax > ws.ymin)) {
    throw std::invalid_argument("workspace must be a finite, non-empty rectangle");
  }
  for (std::size_t i = 0; i < formation.positions.size(); ++i) {
    const Point2 p = formation.positions[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("robot " + std::to_string(i) + " has a non-finite coordinate");
    }
    if (!ws.contains(p)) {
      throw std::invalid_argument("robot " + std::to_string(i) + " lies outside the workspace");
    }
  }
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::square: return "square";
    case Shape::triangle: return "triangle";
    case Shape::circle: return "circle";
    case Shape::inverted_triangle: return "inverted_triangle";
    case Shape::hexagon: return "hexagon";
  }
  return "unknown";
}

std::vector<std::size_t> convex_hull(std::span<const Point2> points) {
  if (points.empty()) {
    throw std::invalid_argument("empty point set");
  }
  for (const Point2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("non-finite point");
    }
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point2 pa = points[a];
    const Point2 pb = points[b];
    return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
  });
  // Coincident robots share one vertex: keep the lowest index.
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return points[a] == points[b]; }),
              order.end());

  if (order.size() < 3) {
    return order;
  }

  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t idx : order) {
    while (k >= 2 && cross(points[hull[k - 2]], points[hull[k - 1]], points[idx]) <= 0.0) {
      --k;
    }
    hull[k++] = idx;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = order.size() - 1; i-- > 0;) {
    const std::size_t idx = order[i];
    while (k >= lower && cross(points[hull[k - 2]], points[hull[k - 1]], points[idx]) <= 0.0) {
      --k;
    }
    hull[k++] = idx;
  }
  // The last vertex repeats the first one.
  hull.resize(k - 1);
  return hull;
}

HullPartition partition(const Formation& formation) {
  HullPartition out;
  out.hull_indices = convex_hull(formation.positions);
  std::vector<bool> on_hull(formation.size(), false);
  for (std::size_t idx : out.hull_indices) {
    on_hull[idx] = true;
  }
  out.interior_indices.reserve(formation.size() - out.hull_indices.size());
  for (std::size_t i = 0; i < formation.size(); ++i) {
    if (!on_hull[i]) {
      out.interior_indices.push_back(i);
    }
  }
  return out;
}

Point2 nearest_point_on_segment(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) {
    return a;
  }
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return {a.x + t * dx, a.y + t * dy};
}

double distance_to_boundary(Point2 p, std::span<const Point2> polygon) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 q = nearest_point_on_segment(p, polygon[i], polygon[(i + 1) % polygon.size()]);
    best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
  }
  return best;
}

bool inside_convex_polygon(Point2 p, std::span<const Point2> ccw_polygon, double tolerance) {
  if (ccw_polygon.size() < 3) {
    return false;
  }
  for (std::size_t i = 0; i < ccw_polygon.size(); ++i) {
    const Point2 a = ccw_polygon[i];
    const Point2 b = ccw_polygon[(i + 1) % ccw_polygon.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) {
      continue;
    }
    if (cross(a, b, p) / len < -tolerance) {
      return false;
    }
  }
  return true;
}

ContourProjection project_to_contour(const Formation& formation) {
  const HullPartition parts = partition(formation);
  ContourProjection out{formation, false};
  if (parts.hull_indices.size() < 3) {
    out.degenerate = true;
    return out;
  }

  std::vector<Point2> hull;
  hull.reserve(parts.hull_indices.size());
  for (std::size_t idx : parts.hull_indices) {
    hull.push_back(formation.positions[idx]);
  }

  for (std::size_t idx : parts.interior_indices) {
    const Point2 p = formation.positions[idx];
    Point2 best_point = hull.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < hull.size(); ++e) {
      const Point2 q = nearest_point_on_segment(p, hull[e], hull[(e + 1) % hull.size()]);
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      if (d < best_dist) {
        best_dist = d;
        best_point = q;
      }
    }
    out.formation.positions[idx] = formation.workspace.clamp(best_point);
  }
  return out;
}

namespace {

std::vector<Point2> regular_polygon(Point2 center, double radius, std::span<const double> degrees) {
  std::vector<Point2> out;
  out.reserve(degrees.size());
  for (double deg : degrees) {
    const double a = deg * std::numbers::pi / 180.0;
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

std::vector<Point2> polygon_outline(Shape shape, Point2 c, double radius) {
  switch (shape) {
    case Shape::square:
      return {{c.x - radius, c.y - radius},
              {c.x + radius, c.y - radius},
              {c.x + radius, c.y + radius},
              {c.x - radius, c.y + radius}};
    case Shape::triangle: {
      static constexpr double kAngles[] = {90.0, 210.0, 330.0};
      return regular_polygon(c, radius, kAngles);
    }
    case Shape::inverted_triangle: {
      static constexpr double kAngles[] = {270.0, 30.0, 150.0};
      return regular_polygon(c, radius, kAngles);
    }
    case Shape::hexagon: {
      static constexpr double kAngles[] = {0.0, 60.0, 120.0, 180.0, 240.0, 300.0};
      return regular_polygon(c, radius, kAngles);
    }
    case Shape::circle:
      break;
  }
  return {};
}

}  // namespace

Formation predefined_formation(Shape shape, std::size_t m, const Rect& workspace, double fraction) {
  if (m < 3) {
    throw std::invalid_argument("predefined formation needs at least 3 robots");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("shape fraction must lie in (0, 1]");
  }
  const Point2 c = workspace.center();
  const double radius = 0.5 * fraction * std::min(workspace.width(), workspace.height());

  Formation out;
  out.workspace = workspace;
  out.positions.reserve(m);

  if (shape == Shape::circle) {
    for (std::size_t i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      out.positions.push_back(workspace.clamp({c.x + radius * std::cos(a), c.y + radius * std::sin(a)}));
    }
    return out;
  }

  const std::vector<Point2> outline = polygon_outline(shape, c, radius);
  std::vector<double> edge_len(outline.size());
  double perimeter = 0.0;
  for (std::size_t i = 0; i < outline.size(); ++i) {
    const Point2 a = outline[i];
    const Point2 b = outline[(i + 1) % outline.size()];
    edge_len[i] = std::hypot(b.x - a.x, b.y - a.y);
    perimeter += edge_len[i];
  }

  const double step = perimeter / static_cast<double>(m);
  std::size_t edge = 0;
  double edge_start = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = step * static_cast<double>(i);
    while (edge + 1 < outline.size() && s >= edge_start + edge_len[edge]) {
      edge_start += edge_len[edge];
      ++edge;
    }
    const double t = std::clamp((s - edge_start) / edge_len[edge], 0.0, 1.0);
    const Point2 a = outline[edge];
    const Point2 b = outline[(edge + 1) % outline.size()];
    out.positions.push_back(workspace.clamp({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}));
  }
  return out;
}

}  // namespace swarmform
