#pragma once

// Reference implementations used only by tests. Each one takes a different
// route from the production code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "swarmform/geometry.hpp"

namespace swarmform::oracle {

inline double orient(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// O(n^3) strict-vertex test: p is a hull vertex iff, for some other point q,
// every other point lies left of the directed line p->q or on that line on
// q's side of p. Coincident points count once (the lowest index).
inline std::set<std::size_t> brute_force_hull(const std::vector<Point2>& pts) {
  std::set<std::size_t> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool shadowed = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (pts[j] == pts[i]) shadowed = true;
    }
    if (shadowed) continue;

    bool all_same = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(pts[j] == pts[i])) all_same = false;
    }
    if (all_same) {
      out.insert(i);
      continue;
    }

    const Point2 p = pts[i];
    for (std::size_t j = 0; j < n; ++j) {
      const Point2 q = pts[j];
      if (q == p) continue;
      bool ok = true;
      for (std::size_t t = 0; t < n && ok; ++t) {
        const Point2 r = pts[t];
        if (r == p) continue;
        const double c = orient(p, q, r);
        if (c < 0.0) {
          ok = false;
        } else if (c == 0.0) {
          const double dot = (r.x - p.x) * (q.x - p.x) + (r.y - p.y) * (q.y - p.y);
          if (dot < 0.0) ok = false;
        }
      }
      if (ok) {
        out.insert(i);
        break;
      }
    }
  }
  return out;
}

// Crossing-number point-in-polygon with an on-edge tolerance.
inline bool point_in_polygon(Point2 p, const std::vector<Point2>& poly, double tol = 1e-9) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double dist_line = len > 0 ? std::abs(orient(a, b, p)) / len : std::hypot(p.x - a.x, p.y - a.y);
    const double t = len > 0 ? ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len) : 0.0;
    if (dist_line <= tol && t >= -tol && t <= 1.0 + tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i];
    const Point2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

// Distance from p to segment ab by sampling-free projection, written
// independently of geometry.cpp.
inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double wx = p.x - a.x;
  const double wy = p.y - a.y;
  const double c1 = vx * wx + vy * wy;
  if (c1 <= 0) return std::hypot(wx, wy);
  const double c2 = vx * vx + vy * vy;
  if (c2 <= c1) return std::hypot(p.x - b.x, p.y - b.y);
  const double t = c1 / c2;
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

inline double boundary_distance(Point2 p, const std::vector<Point2>& poly) {
  double best = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

// Lattice points whose centre lies strictly within r + 1/2 of the origin.
inline std::size_t disc_pixel_count(int radius) {
  std::size_t n = 0;
  for (int y = -radius - 1; y <= radius + 1; ++y) {
    for (int x = -radius - 1; x <= radius + 1; ++x) {
      if (std::sqrt(static_cast<double>(x * x + y * y)) < radius + 0.5) ++n;
    }
  }
  return n;
}

// One-sample Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform_statistic(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp((xs[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic KS critical value at alpha = 0.01.
inline double ks_critical_01(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

inline std::vector<Point2> random_points(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {u(gen), u(gen)};
  return pts;
}

// Small integer grid: forces collinear and duplicate points.
inline std::vector<Point2> random_grid_points(std::mt19937_64& gen, std::size_t n, int cells) {
  std::uniform_int_distribution<int> u(0, cells);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {static_cast<double>(u(gen)), static_cast<double>(u(gen))};
  return pts;
}

}  // namespace swarmform::oracle
