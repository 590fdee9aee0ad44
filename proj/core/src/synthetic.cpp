#include "spmrf/synthetic.hpp"

#include <algorithm>
#include <random>

namespace spmrf {

EdgeMap boundary_edge_map(const Mask& truth) {
  const GridGeometry& g = truth.geometry;
  EdgeMap edges(g);
  for (const auto& np : grid_pairs(g)) {
    if (truth.bits[np.p] != truth.bits[np.q]) {
      edges.bits[np.p] = 1;
      edges.bits[np.q] = 1;
    }
  }
  return edges;
}

SyntheticScene make_two_region_scene(const SceneParams& params) {
  const GridGeometry g(params.width, params.height);
  SyntheticScene scene{RgbImage(g), Mask(g), EdgeMap(g)};
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> noise(0.0, params.noise > 0.0 ? params.noise : 1.0);

  const double cx = params.cx * g.width;
  const double cy = params.cy * g.height;
  const double rx = params.rx * g.width;
  const double ry = params.ry * g.height;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double dx = (x + 0.5 - cx) / rx;
      const double dy = (y + 0.5 - cy) / ry;
      const bool inside = params.rectangle ? (std::abs(dx) < 1.0 && std::abs(dy) < 1.0)
                                           : (dx * dx + dy * dy < 1.0);
      const std::uint32_t p = g.index(x, y);
      scene.truth.bits[p] = inside ? 1 : 0;
      const float* base = inside ? params.fg_rgb : params.bg_rgb;
      for (int c = 0; c < 3; ++c) {
        double v = base[c];
        if (params.noise > 0.0) v += noise(rng);
        scene.image.channels[c][p] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  scene.edges = boundary_edge_map(scene.truth);
  return scene;
}

SceneParams random_scene_params(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SceneParams p;
  p.width = width;
  p.height = height;
  p.cx = 0.35 + 0.3 * unit(rng);
  p.cy = 0.35 + 0.3 * unit(rng);
  p.rx = 0.15 + 0.15 * unit(rng);
  p.ry = 0.15 + 0.15 * unit(rng);
  p.rectangle = unit(rng) < 0.3;
  for (int c = 0; c < 3; ++c) {
    p.fg_rgb[c] = static_cast<float>(0.1 + 0.8 * unit(rng));
    p.bg_rgb[c] = static_cast<float>(0.1 + 0.8 * unit(rng));
  }
  // Keep the two means apart so that the regions are distinguishable.
  if (std::abs(p.fg_rgb[0] - p.bg_rgb[0]) < 0.3f) p.fg_rgb[0] = p.bg_rgb[0] > 0.5f ? 0.05f : 0.95f;
  p.noise = 0.02 + 0.08 * unit(rng);
  p.seed = seed;
  return p;
}

SuperpixelPartition block_partition(const GridGeometry& geometry, int block_w, int block_h) {
  if (block_w < 1 || block_h < 1) throw DimensionError("block size must be positive");
  const int cols = (geometry.width + block_w - 1) / block_w;
  std::vector<std::uint32_t> labels(geometry.pixel_count());
  for (int y = 0; y < geometry.height; ++y) {
    for (int x = 0; x < geometry.width; ++x) {
      labels[geometry.index(x, y)] = static_cast<std::uint32_t>((y / block_h) * cols + x / block_w);
    }
  }
  return SuperpixelPartition(geometry, std::move(labels));
}

}  // namespace spmrf
