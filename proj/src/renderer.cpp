#include "swarmform/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace swarmform {

void CanvasSpec::validate() const {
  if (width_px <= 2 * margin_px || height_px <= 2 * margin_px) {
    throw std::invalid_argument("canvas must be larger than twice its margin");
  }
  if (margin_px < 0) {
    throw std::invalid_argument("canvas margin must be non-negative");
  }
  if (dot_radius_px < 1) {
    throw std::invalid_argument("dot radius must be at least 1 px");
  }
  if (line_width_px < 1) {
    throw std::invalid_argument("line width must be at least 1 px");
  }
}

RasterImage::RasterImage(int width, int height, Color fill)
    : width_px(width), height_px(height), pixels(static_cast<std::size_t>(width) * height * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Color RasterImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_px + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RasterImage::set(int x, int y, Color c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_px + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

std::size_t BitMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

WorldToImage::WorldToImage(const Rect& workspace, const CanvasSpec& canvas)
    : world_center_(workspace.center()),
      image_cx_(0.5 * canvas.width_px),
      image_cy_(0.5 * canvas.height_px) {
  const double sx = (canvas.width_px - 2.0 * canvas.margin_px) / workspace.width();
  const double sy = (canvas.height_px - 2.0 * canvas.margin_px) / workspace.height();
  scale_ = std::min(sx, sy);
}

PixelCoord WorldToImage::operator()(Point2 p) const {
  const double u = image_cx_ + (p.x - world_center_.x) * scale_;
  const double v = image_cy_ - (p.y - world_center_.y) * scale_;
  return {static_cast<int>(std::floor(u + 0.5)), static_cast<int>(std::floor(v + 0.5))};
}

void fill_disc(RasterImage& image, PixelCoord center, int radius, Color color) {
  // Same pixel set as a midpoint-circle scanline fill: d^2 <= r^2 + r.
  const int limit = radius * radius + radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= limit && image.in_bounds(center.x + dx, center.y + dy)) {
        image.set(center.x + dx, center.y + dy, color);
      }
    }
  }
}

namespace {

void stamp(RasterImage& image, int x, int y, int width, Color color) {
  const int lo = -(width - 1) / 2;
  const int hi = lo + width;
  for (int dy = lo; dy < hi; ++dy) {
    for (int dx = lo; dx < hi; ++dx) {
      if (image.in_bounds(x + dx, y + dy)) {
        image.set(x + dx, y + dy, color);
      }
    }
  }
}

}  // namespace

void draw_line(RasterImage& image, PixelCoord a, PixelCoord b, int width, Color color) {
  // Bresenham with a square brush.
  int x = a.x;
  int y = a.y;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    stamp(image, x, y, width, color);
    if (x == b.x && y == b.y) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

RasterImage render(const Formation& formation, const HullPartition& partition,
                   const CanvasSpec& canvas) {
  canvas.validate();
  RasterImage image(canvas.width_px, canvas.height_px, canvas.background);
  const WorldToImage to_image(formation.workspace, canvas);

  if (partition.hull_indices.size() >= 3) {
    const auto& hull = partition.hull_indices;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const PixelCoord a = to_image(formation.positions[hull[i]]);
      const PixelCoord b = to_image(formation.positions[hull[(i + 1) % hull.size()]]);
      draw_line(image, a, b, canvas.line_width_px, canvas.ink);
    }
  }
  for (const Point2& p : formation.positions) {
    fill_disc(image, to_image(p), canvas.dot_radius_px, canvas.ink);
  }
  return image;
}

RasterImage render(const Formation& formation, const CanvasSpec& canvas) {
  return render(formation, partition(formation), canvas);
}

BitMask rasterize_mask(const RasterImage& image, int threshold) {
  BitMask mask;
  mask.width_px = image.width_px;
  mask.height_px = image.height_px;
  mask.bits.resize(static_cast<std::size_t>(image.width_px) * image.height_px);
  const int limit = 3 * threshold;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const int sum = image.pixels[3 * i] + image.pixels[3 * i + 1] + image.pixels[3 * i + 2];
    mask.bits[i] = sum < limit ? 1 : 0;
  }
  return mask;
}

}  // namespace swarmform
