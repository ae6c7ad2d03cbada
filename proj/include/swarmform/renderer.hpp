#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swarmform/geometry.hpp"

namespace swarmform {

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Color&, const Color&) = default;
};

struct CanvasSpec {
  int width_px = 224;
  int height_px = 224;
  int margin_px = 16;
  int dot_radius_px = 3;
  int line_width_px = 2;
  Color background{255, 255, 255};
  Color ink{0, 0, 0};

  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const CanvasSpec&, const CanvasSpec&) = default;
};

// 8-bit RGB, row-major, top row first.
struct RasterImage {
  int width_px = 0;
  int height_px = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int width, int height, Color fill);

  Color at(int x, int y) const;
  void set(int x, int y, Color c);
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_px && y < height_px; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

struct BitMask {
  int width_px = 0;
  int height_px = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1 per pixel

  std::size_t count() const;
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width_px + x] != 0; }

  friend bool operator==(const BitMask&, const BitMask&) = default;
};

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Uniform-scale fit of the workspace into the canvas interior, centered,
// flipping y so that world "up" is image "up".
class WorldToImage {
 public:
  WorldToImage(const Rect& workspace, const CanvasSpec& canvas);

  PixelCoord operator()(Point2 p) const;
  double scale() const { return scale_; }

 private:
  Point2 world_center_;
  double image_cx_;
  double image_cy_;
  double scale_;
};

// Draws every robot as a filled disc and, when the hull has at least three
// vertices, the closed hull polyline. No anti-aliasing.
RasterImage render(const Formation& formation, const HullPartition& partition,
                   const CanvasSpec& canvas = {});

// Convenience overload that computes the partition.
RasterImage render(const Formation& formation, const CanvasSpec& canvas = {});

// True where the mean channel intensity is below the threshold.
BitMask rasterize_mask(const RasterImage& image, int threshold = 128);

// Primitives exposed for tests and for drawing template targets.
void fill_disc(RasterImage& image, PixelCoord center, int radius, Color color);
void draw_line(RasterImage& image, PixelCoord a, PixelCoord b, int width, Color color);

}  // namespace swarmform
