#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spmrf/mrf.hpp"

namespace spmrf {

/// Assignment of every pixel to exactly one superpixel index in [0, K).
/// Every index in [0, K) owns at least one pixel.
class SuperpixelPartition {
 public:
  SuperpixelPartition() = default;
  /// Takes labels that must already be dense; throws otherwise.
  SuperpixelPartition(GridGeometry geometry, std::vector<std::uint32_t> labels);

  /// Relabels arbitrary labels to [0, K) in order of first occurrence.
  [[nodiscard]] static SuperpixelPartition compacted(GridGeometry geometry,
                                                     std::span<const std::uint32_t> labels);

  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::span<const std::uint32_t> labels() const { return labels_; }
  [[nodiscard]] std::uint32_t label(std::uint32_t p) const { return labels_[p]; }
  [[nodiscard]] std::uint32_t count() const { return count_; }
  [[nodiscard]] std::vector<std::uint32_t> sizes() const;

  friend bool operator==(const SuperpixelPartition&, const SuperpixelPartition&) = default;

 private:
  GridGeometry geometry_;
  std::vector<std::uint32_t> labels_;
  std::uint32_t count_ = 0;
};

/// Planar RGB image, channel values in [0, 1].
struct RgbImage {
  GridGeometry geometry;
  std::array<std::vector<float>, 3> channels;

  RgbImage() = default;
  explicit RgbImage(GridGeometry g);

  void set(std::uint32_t p, float r, float g, float b) {
    channels[0][p] = r;
    channels[1][p] = g;
    channels[2][p] = b;
  }
};

[[nodiscard]] SuperpixelPartition identity_partition(const GridGeometry& geometry);

struct SlicParams {
  int target_count = 800;
  double compactness = 10.0;
  int iterations = 10;
};

/// Grid-seeded k-means over (r, g, b, x, y) followed by a connectivity pass
/// that folds stray fragments into their largest neighboring superpixel.
[[nodiscard]] SuperpixelPartition slic_superpixels(const RgbImage& image, const SlicParams& params);

/// Dense-relabels in place and reports whether anything changed.
struct LoadedPartition {
  SuperpixelPartition partition;
  bool relabeled = false;
};

/// Accepts a 16-bit (or 8-bit) binary PGM or the CSV form
/// `width,height` followed by one index per line.
[[nodiscard]] LoadedPartition load_partition(std::string_view bytes);

enum class PartitionFormat { kPgm16, kCsv };
[[nodiscard]] std::string save_partition(const SuperpixelPartition& partition,
                                         PartitionFormat format = PartitionFormat::kPgm16);

struct SuperpixelAdjacency {
  std::uint32_t k = 0;
  std::uint32_t l = 0;
  std::uint32_t crossing_pairs = 0;

  friend bool operator==(const SuperpixelAdjacency&, const SuperpixelAdjacency&) = default;
};

/// Superpixel pairs (k < l) joined by at least one neighbor pair, sorted.
[[nodiscard]] std::vector<SuperpixelAdjacency> adjacency(const SuperpixelPartition& partition,
                                                         std::span<const NeighborPair> pairs);

/// True when every superpixel is a single 4-connected component.
[[nodiscard]] bool is_connected(const SuperpixelPartition& partition);

}  // namespace spmrf
