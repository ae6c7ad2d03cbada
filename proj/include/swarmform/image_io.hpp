#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmform/renderer.hpp"

namespace swarmform {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 8-bit RGB, non-interlaced, fixed zlib level and filter so output bytes are
// reproducible for a given libpng build.
std::vector<std::uint8_t> encode_png(const RasterImage& image);

// Accepts any PNG libpng can read; converts to 8-bit RGB (alpha dropped,
// gray expanded).
RasterImage decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const RasterImage& image);
RasterImage read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace swarmform
