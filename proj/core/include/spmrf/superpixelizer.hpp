#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spmrf/mrf.hpp"
#include "spmrf/partition.hpp"

namespace spmrf {

/// K-node MRF obtained by substituting f_p = x_{k(p)} into a pixel MRF.
/// Edges keep k < l; `constant` carries the original constant plus the
/// summed w00 of every intra-superpixel pair, so energies match exactly.
struct SuperpixelMrf {
  std::uint32_t node_count = 0;
  std::vector<double> unary;
  std::vector<PairwiseTerm> edges;
  double constant = 0.0;

  [[nodiscard]] MrfView view() const { return {unary, edges, constant}; }
};

/// Intermediate sums gathered while aggregating.
struct AggregationReport {
  std::vector<double> unary_sum;        // sum of w_p over the superpixel
  std::vector<double> interior_w00;     // sum of w00 over pairs inside it
  std::vector<double> interior_w11;     // sum of w11 over pairs inside it
  std::vector<std::uint32_t> interior_pairs;
  std::vector<std::uint32_t> crossing_pairs;  // parallel to SuperpixelMrf::edges

  [[nodiscard]] std::uint64_t total_pairs() const;
};

struct Superpixelized {
  SuperpixelMrf mrf;
  AggregationReport report;
};

/// Exact aggregation in one pass over pixels and one pass over pairs.
/// Edges appear in the order their first crossing pair is met.
[[nodiscard]] Superpixelized superpixelize(const PixelMrf& mrf, const SuperpixelPartition& partition);

/// Potts pixel MRF: unary w_p plus w_pq |f_p - f_q| per neighbor pair.
struct PottsTerm {
  NeighborPair pair;
  double weight = 0.0;
};

struct PottsMrf {
  GridGeometry geometry;
  std::vector<double> unary;
  std::vector<PottsTerm> pairs;
  double constant = 0.0;
};

/// General four-weight encoding (w00 = w11 = 0, w01 = w10 = w_pq).
[[nodiscard]] PixelMrf to_general(const PottsMrf& potts);

/// Aggregation specialized for Potts terms: no interior corrections are
/// needed and each edge accumulates a single weight.
[[nodiscard]] SuperpixelMrf superpixelize_potts(const PottsMrf& potts,
                                                const SuperpixelPartition& partition);

/// f_p = x_{k(p)}.
[[nodiscard]] Labeling lift(const Labeling& superpixel_labels, const SuperpixelPartition& partition);

/// Inverse of lift for superpixel-constant pixel labelings; throws
/// DimensionError when some superpixel carries both labels.
[[nodiscard]] Labeling restrict_to_superpixels(const Labeling& pixel_labels,
                                               const SuperpixelPartition& partition);

[[nodiscard]] inline double sp_energy(const SuperpixelMrf& sp, const Labeling& x) {
  return energy(sp.view(), x);
}

/// |V_kl(m, n) - sum over crossing pairs of V_pq| for one superpixel edge,
/// indexed by 2m + n.
struct EdgeResidual {
  std::uint32_t k = 0;
  std::uint32_t l = 0;
  std::array<double, 4> residual{};

  [[nodiscard]] double max() const;
};

/// Recomputes every superpixel pairwise table by direct summation over the
/// crossing pixel pairs and compares with `sp`. Edges present on only one
/// side are compared against an all-zero table.
[[nodiscard]] std::vector<EdgeResidual> pairwise_residuals(const PixelMrf& mrf,
                                                         const SuperpixelPartition& partition,
                                                         const SuperpixelMrf& sp);

}  // namespace spmrf
