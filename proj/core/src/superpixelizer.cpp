#include "spmrf/superpixelizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace spmrf {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Edge lookup keyed by the smaller endpoint; intrusive singly linked lists in
// flat arrays so that aggregation does no per-node allocation.
class EdgeIndex {
 public:
  explicit EdgeIndex(std::uint32_t node_count) : head_(node_count, kNone) {}

  // Returns the edge index for (k, l), k < l, and whether it was created.
  std::pair<std::uint32_t, bool> find_or_insert(std::uint32_t k, std::uint32_t l) {
    for (std::uint32_t e = head_[k]; e != kNone; e = next_[e]) {
      if (other_[e] == l) return {e, false};
    }
    const auto e = static_cast<std::uint32_t>(other_.size());
    other_.push_back(l);
    next_.push_back(head_[k]);
    head_[k] = e;
    return {e, true};
  }

 private:
  std::vector<std::uint32_t> head_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> other_;
};

void check_geometry(const GridGeometry& a, const SuperpixelPartition& partition) {
  if (!(a == partition.geometry())) {
    throw DimensionError("MRF grid " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                         " does not match partition grid " +
                         std::to_string(partition.geometry().width) + "x" +
                         std::to_string(partition.geometry().height));
  }
}

}  // namespace

std::uint64_t AggregationReport::total_pairs() const {
  std::uint64_t total = 0;
  for (auto c : interior_pairs) total += c;
  for (auto c : crossing_pairs) total += c;
  return total;
}

Superpixelized superpixelize(const PixelMrf& mrf, const SuperpixelPartition& partition) {
  check_geometry(mrf.geometry, partition);
  if (mrf.unary.size() != mrf.geometry.pixel_count()) {
    throw DimensionError("unary length does not match grid");
  }
  const std::uint32_t K = partition.count();
  Superpixelized out;
  SuperpixelMrf& sp = out.mrf;
  AggregationReport& rep = out.report;
  sp.node_count = K;
  rep.unary_sum.assign(K, 0.0);
  rep.interior_w00.assign(K, 0.0);
  rep.interior_w11.assign(K, 0.0);
  rep.interior_pairs.assign(K, 0);

  const auto labels = partition.labels();
  for (std::size_t p = 0; p < mrf.unary.size(); ++p) rep.unary_sum[labels[p]] += mrf.unary[p];

  EdgeIndex index(K);
  for (const auto& term : mrf.pairs) {
    const std::uint32_t k = labels[term.first];
    const std::uint32_t l = labels[term.second];
    if (k == l) {
      // x_k and its complement never coincide, so only w00 and w11 survive.
      rep.interior_w00[k] += term.weights.w00;
      rep.interior_w11[k] += term.weights.w11;
      ++rep.interior_pairs[k];
      continue;
    }
    const bool forward = k < l;
    const auto [e, created] = forward ? index.find_or_insert(k, l) : index.find_or_insert(l, k);
    if (created) {
      sp.edges.push_back({forward ? k : l, forward ? l : k, {}});
      rep.crossing_pairs.push_back(0);
    }
    sp.edges[e].weights += forward ? term.weights : term.weights.swapped();
    ++rep.crossing_pairs[e];
  }

  sp.unary.resize(K);
  double interior_constant = 0.0;
  for (std::uint32_t k = 0; k < K; ++k) {
    sp.unary[k] = rep.unary_sum[k] - rep.interior_w00[k] + rep.interior_w11[k];
    interior_constant += rep.interior_w00[k];
  }
  sp.constant = mrf.constant + interior_constant;
  return out;
}

PixelMrf to_general(const PottsMrf& potts) {
  PixelMrf mrf;
  mrf.geometry = potts.geometry;
  mrf.unary = potts.unary;
  mrf.constant = potts.constant;
  mrf.pairs.reserve(potts.pairs.size());
  for (const auto& t : potts.pairs) {
    mrf.pairs.push_back({t.pair.p, t.pair.q, {0.0, t.weight, t.weight, 0.0}});
  }
  return mrf;
}

SuperpixelMrf superpixelize_potts(const PottsMrf& potts, const SuperpixelPartition& partition) {
  check_geometry(potts.geometry, partition);
  if (potts.unary.size() != potts.geometry.pixel_count()) {
    throw DimensionError("unary length does not match grid");
  }
  const std::uint32_t K = partition.count();
  const auto labels = partition.labels();
  SuperpixelMrf sp;
  sp.node_count = K;
  sp.unary.assign(K, 0.0);
  for (std::size_t p = 0; p < potts.unary.size(); ++p) sp.unary[labels[p]] += potts.unary[p];

  EdgeIndex index(K);
  std::vector<double> edge_weight;
  for (const auto& t : potts.pairs) {
    std::uint32_t k = labels[t.pair.p];
    std::uint32_t l = labels[t.pair.q];
    if (k == l) continue;
    if (k > l) std::swap(k, l);
    const auto [e, created] = index.find_or_insert(k, l);
    if (created) {
      sp.edges.push_back({k, l, {}});
      edge_weight.push_back(0.0);
    }
    edge_weight[e] += t.weight;
  }
  for (std::size_t e = 0; e < sp.edges.size(); ++e) {
    sp.edges[e].weights = {0.0, edge_weight[e], edge_weight[e], 0.0};
  }
  sp.constant = potts.constant;
  return sp;
}

Labeling lift(const Labeling& superpixel_labels, const SuperpixelPartition& partition) {
  if (superpixel_labels.size() != partition.count()) {
    throw DimensionError("labeling has " + std::to_string(superpixel_labels.size()) +
                         " entries, partition has " + std::to_string(partition.count()) +
                         " superpixels");
  }
  const auto labels = partition.labels();
  std::vector<std::uint8_t> bits(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) bits[p] = superpixel_labels[labels[p]];
  return Labeling(std::move(bits));
}

Labeling restrict_to_superpixels(const Labeling& pixel_labels, const SuperpixelPartition& partition) {
  const auto labels = partition.labels();
  if (pixel_labels.size() != labels.size()) {
    throw DimensionError("pixel labeling length does not match partition");
  }
  std::vector<std::uint8_t> value(partition.count(), 2);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    std::uint8_t& v = value[labels[p]];
    if (v == 2) {
      v = pixel_labels[p];
    } else if (v != pixel_labels[p]) {
      throw DimensionError("superpixel " + std::to_string(labels[p]) + " is not label-constant");
    }
  }
  return Labeling(std::move(value));
}

double EdgeResidual::max() const { return *std::max_element(residual.begin(), residual.end()); }

std::vector<EdgeResidual> pairwise_residuals(const PixelMrf& mrf,
                                             const SuperpixelPartition& partition,
                                             const SuperpixelMrf& sp) {
  check_geometry(mrf.geometry, partition);
  // Direct summation of V_pq(m, n) over crossing pairs, keyed by (k, l).
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::array<double, 4>> direct;
  const auto labels = partition.labels();
  for (const auto& term : mrf.pairs) {
    const std::uint32_t a = labels[term.first];
    const std::uint32_t b = labels[term.second];
    if (a == b) continue;
    const std::uint32_t k = std::min(a, b);
    const std::uint32_t l = std::max(a, b);
    auto& sums = direct[{k, l}];
    for (int m = 0; m < 2; ++m) {
      for (int n = 0; n < 2; ++n) {
        // x_k = m, x_l = n; the pixel in superpixel k takes m.
        sums[2 * m + n] += a == k ? term.weights.at(m, n) : term.weights.at(n, m);
      }
    }
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::array<double, 4>> aggregated;
  for (const auto& e : sp.edges) {
    auto& t = aggregated[{e.first, e.second}];
    for (int m = 0; m < 2; ++m) {
      for (int n = 0; n < 2; ++n) t[2 * m + n] += e.weights.at(m, n);
    }
  }

  std::vector<EdgeResidual> out;
  auto emit = [&](std::pair<std::uint32_t, std::uint32_t> key, const std::array<double, 4>& lhs,
                  const std::array<double, 4>& rhs) {
    EdgeResidual r{key.first, key.second, {}};
    for (int i = 0; i < 4; ++i) r.residual[i] = std::abs(lhs[i] - rhs[i]);
    out.push_back(r);
  };
  for (const auto& [key, lhs] : aggregated) {
    const auto it = direct.find(key);
    emit(key, lhs, it == direct.end() ? std::array<double, 4>{} : it->second);
  }
  for (const auto& [key, rhs] : direct) {
    if (!aggregated.contains(key)) emit(key, std::array<double, 4>{}, rhs);
  }
  return out;
}

}  // namespace spmrf
