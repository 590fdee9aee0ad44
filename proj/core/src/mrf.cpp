#include "spmrf/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace spmrf {

GridGeometry::GridGeometry(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw DimensionError("grid dimensions must be positive, got " + std::to_string(w) + "x" +
                         std::to_string(h));
  }
}

Labeling::Labeling(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

Labeling Labeling::complemented() const {
  Labeling out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

void PixelMrf::validate() const {
  const std::size_t n = geometry.pixel_count();
  if (unary.size() != n) {
    throw DimensionError("unary has " + std::to_string(unary.size()) + " entries, grid has " +
                         std::to_string(n) + " pixels");
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& t : pairs) {
    if (t.first >= n || t.second >= n) throw DimensionError("pair index out of range");
    if (t.first >= t.second) throw DimensionError("pair must satisfy p < q");
    if (!seen.emplace(t.first, t.second).second) {
      throw DimensionError("duplicate pair (" + std::to_string(t.first) + "," +
                           std::to_string(t.second) + ")");
    }
  }
}

std::vector<NeighborPair> grid_pairs(const GridGeometry& geometry) {
  std::vector<NeighborPair> out;
  const int w = geometry.width;
  const int h = geometry.height;
  out.reserve(static_cast<std::size_t>((w - 1) * h + w * (h - 1)));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint32_t p = geometry.index(x, y);
      if (x + 1 < w) out.push_back({p, p + 1});
      if (y + 1 < h) out.push_back({p, p + static_cast<std::uint32_t>(w)});
    }
  }
  return out;
}

PixelMrf build_grid_mrf(const GridGeometry& geometry, std::vector<double> unary,
                        const PairWeightFn& pair_weight_fn, double constant) {
  if (unary.size() != geometry.pixel_count()) {
    throw DimensionError("unary has " + std::to_string(unary.size()) + " entries, grid has " +
                         std::to_string(geometry.pixel_count()) + " pixels");
  }
  PixelMrf mrf;
  mrf.geometry = geometry;
  mrf.unary = std::move(unary);
  mrf.constant = constant;
  const auto pairs = grid_pairs(geometry);
  mrf.pairs.reserve(pairs.size());
  for (const auto& np : pairs) mrf.pairs.push_back({np.p, np.q, pair_weight_fn(np)});
  return mrf;
}

double energy(const MrfView& mrf, const Labeling& labeling) {
  if (labeling.size() != mrf.node_count()) {
    throw DimensionError("labeling has " + std::to_string(labeling.size()) + " entries, MRF has " +
                         std::to_string(mrf.node_count()) + " nodes");
  }
  double e = mrf.constant;
  for (std::size_t i = 0; i < mrf.unary.size(); ++i) {
    if (labeling[i]) e += mrf.unary[i];
  }
  for (const auto& t : mrf.terms) e += t.weights.at(labeling[t.first], labeling[t.second]);
  return e;
}

SubmodularityReport check_submodular(std::span<const PairwiseTerm> terms) {
  SubmodularityReport report;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& w = terms[i].weights;
    if (w.w00 + w.w11 > w.w01 + w.w10 + kSubmodularTolerance) {
      report.submodular = false;
      report.violating_terms.push_back(i);
    }
  }
  return report;
}

MinimizationResult brute_force_minimize(const MrfView& mrf) {
  const std::size_t n = mrf.node_count();
  if (n > kBruteForceMaxNodes) {
    throw DimensionError("brute force limited to " + std::to_string(kBruteForceMaxNodes) +
                         " nodes, got " + std::to_string(n));
  }
  MinimizationResult best{Labeling(n), std::numeric_limits<double>::infinity()};
  Labeling current(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t v = 0; v < total; ++v) {
    for (std::size_t i = 0; i < n; ++i) current.set(i, (v >> (n - 1 - i)) & 1U);
    const double e = energy(mrf, current);
    if (e < best.energy) {
      best.energy = e;
      best.labeling = current;
    }
  }
  return best;
}

}  // namespace spmrf
