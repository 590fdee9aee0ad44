#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spmrf/mrf.hpp"
#include "spmrf/partition.hpp"
#include "spmrf/solver.hpp"
#include "spmrf/superpixelizer.hpp"

namespace spmrf {

/// Seeds that contradict each other, the box, or the image bounds.
class SeedError : public Error {
 public:
  using Error::Error;
};

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Inclusive pixel rectangle.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  [[nodiscard]] bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Seeds {
  std::vector<Point> fg;
  std::vector<Point> bg;
  std::optional<PixelRect> box;

  [[nodiscard]] bool empty() const { return fg.empty() && bg.empty(); }
  /// Throws SeedError on out-of-bounds points, fg/bg overlap, fg outside the
  /// box, or a malformed box.
  void validate(const GridGeometry& geometry) const;
  /// Union of point sets (sorted, deduplicated); a box in `increment`
  /// replaces the current one.
  void merge(const Seeds& increment);
  [[nodiscard]] std::vector<Point> all_points() const;
};

/// Binary per-pixel map: object masks, ground truth, and edge maps.
struct BinaryMap {
  GridGeometry geometry;
  std::vector<std::uint8_t> bits;

  BinaryMap() = default;
  explicit BinaryMap(GridGeometry g, std::uint8_t value = 0) : geometry(g), bits(g.pixel_count(), value) {}
  BinaryMap(GridGeometry g, std::vector<std::uint8_t> b);

  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool at(int x, int y) const { return bits[geometry.index(x, y)] != 0; }

  friend bool operator==(const BinaryMap&, const BinaryMap&) = default;
};

using Mask = BinaryMap;
using EdgeMap = BinaryMap;

inline const double kOnEdgeWeight = std::exp(-5.0);
inline constexpr double kOffEdgeWeight = 20.0;

/// Potts weight per 4-neighbor pair: exp(-5) when either pixel is an edge
/// pixel, 20 otherwise. Pair order matches grid_pairs().
[[nodiscard]] std::vector<PottsTerm> edge_pairwise_weights(const EdgeMap& edges);

/// Central-difference luminance gradient magnitude; pixels at or above the
/// 90th percentile (and with non-zero gradient) are edges.
[[nodiscard]] EdgeMap gradient_edge_map(const RgbImage& image);

struct UnaryParams {
  double lambda = 1.0;
  int bins = 16;
  double smoothing = 1.0;
};

/// Hard-constraint magnitude for a given largest soft unary.
[[nodiscard]] inline double hard_constraint_weight(double max_abs_soft) {
  return 1e6 * (max_abs_soft + 1.0);
}

/// w_p = lambda (log P_bg(c_p) - log P_fg(c_p)) from per-channel seed
/// histograms, then -M on fg seeds and +M on bg seeds and outside the box.
/// A side without seeds uses the uniform distribution; no seeds at all is an
/// error.
[[nodiscard]] std::vector<double> seed_unary(const RgbImage& image, const Seeds& seeds,
                                             const UnaryParams& params = {});

/// Pixel-level Potts model combining seed_unary and edge_pairwise_weights.
[[nodiscard]] PottsMrf build_segmentation_mrf(const RgbImage& image, const EdgeMap& edges,
                                              const Seeds& seeds, const UnaryParams& params = {});

struct SegmentTimings {
  double unary_ms = 0.0;        // unary and pairwise weights
  double aggregation_ms = 0.0;  // superpixel aggregation only
  double solve_ms = 0.0;        // s-t graph construction and max-flow
  double total_ms = 0.0;
};

struct SegmentResult {
  Mask mask;
  SolveResult solve;
  SegmentTimings timings;
  std::uint32_t node_count = 0;
};

[[nodiscard]] SegmentResult segment_superpixel(const RgbImage& image, const EdgeMap& edges,
                                               const Seeds& seeds,
                                               const SuperpixelPartition& partition,
                                               const UnaryParams& params = {});

[[nodiscard]] SegmentResult segment_pixel(const RgbImage& image, const EdgeMap& edges,
                                          const Seeds& seeds, const UnaryParams& params = {});

/// Jaccard index; two empty masks give 1.
[[nodiscard]] double overlap_ratio(const Mask& result, const Mask& truth);

/// Foreground pixels with a 4-neighbor in the background.
[[nodiscard]] Mask mask_boundary(const Mask& mask);

/// Squared Euclidean distance from every pixel to the nearest set pixel of
/// `features` (infinity when there is none).
[[nodiscard]] std::vector<double> squared_distance_transform(const BinaryMap& features);

/// Mean of the two directed average boundary-to-boundary distances.
[[nodiscard]] double boundary_deviation(const Mask& result, const Mask& truth);

/// Next simulated user click: a disk of radius `step` (restricted to pixels
/// sharing the truth label) centred on the pixel deepest inside the largest
/// misclassified region. std::nullopt when the masks already agree.
[[nodiscard]] std::optional<Seeds> robot_user(const Mask& current, const Mask& truth, int step);

/// Weight of the Euclidean minimum spanning tree over the seed points.
[[nodiscard]] double user_effort(std::span<const Point> points);
[[nodiscard]] inline double user_effort(const Seeds& seeds) { return user_effort(seeds.all_points()); }

}  // namespace spmrf
