#pragma once

#include <cstdint>

#include "spmrf/partition.hpp"
#include "spmrf/segmentation.hpp"

namespace spmrf {

/// Two-region test image with exact ground truth.
struct SyntheticScene {
  RgbImage image;
  Mask truth;
  /// Pixels on either side of the truth boundary.
  EdgeMap edges;
};

struct SceneParams {
  int width = 64;
  int height = 64;
  /// Ellipse centre and radii as fractions of the image size.
  double cx = 0.5, cy = 0.5, rx = 0.3, ry = 0.3;
  /// Axis-aligned rectangle instead of an ellipse.
  bool rectangle = false;
  float fg_rgb[3] = {0.85f, 0.25f, 0.2f};
  float bg_rgb[3] = {0.15f, 0.35f, 0.8f};
  /// Standard deviation of additive Gaussian noise per channel.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

[[nodiscard]] SyntheticScene make_two_region_scene(const SceneParams& params);

/// Pixels on either side of the boundary between set and unset pixels.
[[nodiscard]] EdgeMap boundary_edge_map(const Mask& truth);

/// Randomized scene parameters (shape, colors, noise) drawn from `seed`.
[[nodiscard]] SceneParams random_scene_params(int width, int height, std::uint64_t seed);

/// Axis-aligned blocks of block_w x block_h pixels (edge blocks truncated).
[[nodiscard]] SuperpixelPartition block_partition(const GridGeometry& geometry, int block_w,
                                                  int block_h);

}  // namespace spmrf
