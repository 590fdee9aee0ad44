#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "spmrf/partition.hpp"
#include "spmrf/segmentation.hpp"

namespace spmrf::tools {

/// {"fg": [[x,y],...], "bg": [[x,y],...], "box": [x0,y0,x1,y1]}; every key
/// optional. Throws ParseError on anything else.
[[nodiscard]] Seeds parse_seeds_json(std::string_view text);
[[nodiscard]] std::string seeds_to_json(const Seeds& seeds);

/// Binary map from any PGM/PPM/PNG; non-zero samples are set.
[[nodiscard]] BinaryMap load_binary_map(const std::filesystem::path& path);
/// 0/255 PGM, or PNG when the extension is .png.
void save_mask(const std::filesystem::path& path, const Mask& mask);
[[nodiscard]] std::string mask_png(const Mask& mask);

/// Pixels whose right or lower neighbor lies in another superpixel.
[[nodiscard]] Mask superpixel_boundaries(const SuperpixelPartition& partition);

}  // namespace spmrf::tools
