#include "swarmform/image_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace swarmform {

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text != nullptr) {
    *text = message;
  }
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) {
    png_error(png, "truncated PNG data");
  }
  std::memcpy(data, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  if (image.width_px <= 0 || image.height_px <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width_px) * image.height_px * 3) {
    throw ImageIoError("cannot encode an image with inconsistent dimensions");
  }

  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (png == nullptr) {
    throw ImageIoError("png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height_px));

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageIoError("PNG encode failed: " + error);
  }

  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width_px),
               static_cast<png_uint_32>(image.height_px), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_write_info(png, info);
  for (int y = 0; y < image.height_px; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(y) * image.width_px * 3);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw ImageIoError("not a PNG file");
  }

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (png == nullptr) {
    throw ImageIoError("png_create_read_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes, 0};
  RasterImage image;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError("PNG decode failed: " + error);
  }

  png_set_read_fn(png, &cursor, read_from_span);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) {
    png_set_strip_16(png);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) {
    png_set_strip_alpha(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  image.width_px = static_cast<int>(png_get_image_width(png, info));
  image.height_px = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(image.width_px) * 3) {
    png_error(png, "unexpected row layout after conversion");
  }
  image.pixels.resize(static_cast<std::size_t>(image.width_px) * image.height_px * 3);
  rows.resize(static_cast<std::size_t>(image.height_px));
  for (int y = 0; y < image.height_px; ++y) {
    rows[static_cast<std::size_t>(y)] = image.pixels.data() + static_cast<std::size_t>(y) * image.width_px * 3;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ImageIoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ImageIoError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ImageIoError("short write to " + path.string());
  }
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
  write_file_bytes(path, encode_png(image));
}

RasterImage read_png(const std::filesystem::path& path) {
  return decode_png(read_file_bytes(path));
}

}  // namespace swarmform
