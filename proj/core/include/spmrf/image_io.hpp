#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spmrf/mrf.hpp"
#include "spmrf/partition.hpp"

namespace spmrf {

/// Interleaved raster decoded from PGM/PPM/PNG. Samples keep the source bit
/// depth; `maxval` is 255 for 8-bit and up to 65535 for 16-bit data.
struct Raster {
  GridGeometry geometry;
  int channels = 1;
  int maxval = 255;
  std::vector<std::uint16_t> samples;
};

[[nodiscard]] Raster read_netpbm(std::string_view bytes);
[[nodiscard]] Raster decode_png(std::string_view bytes);
/// PNG when the PNG signature is present, binary PGM/PPM otherwise.
[[nodiscard]] Raster decode_raster(std::string_view bytes);

[[nodiscard]] std::string encode_pgm8(const GridGeometry& g, std::span<const std::uint8_t> values);
[[nodiscard]] std::string encode_pgm16(const GridGeometry& g, std::span<const std::uint16_t> values);
[[nodiscard]] std::string encode_ppm8(const RgbImage& image);
[[nodiscard]] std::string encode_png_gray8(const GridGeometry& g,
                                           std::span<const std::uint8_t> values);

/// Gray rasters are replicated to three channels.
[[nodiscard]] RgbImage to_rgb_image(const Raster& raster);
[[nodiscard]] RgbImage load_rgb_image(std::string_view bytes);

/// Any non-zero sample marks the pixel.
[[nodiscard]] std::vector<std::uint8_t> raster_to_bits(const Raster& raster);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace spmrf
