#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spmrf/mrf.hpp"

namespace spmrf {

/// s-t flow network with implicit terminals. Every non-terminal arc is
/// stored together with its reverse; terminal links are per-node capacities.
class FlowGraph {
 public:
  struct Arc {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double capacity = 0.0;
    double reverse_capacity = 0.0;
  };

  FlowGraph() = default;
  explicit FlowGraph(std::uint32_t node_count);

  [[nodiscard]] std::uint32_t node_count() const { return static_cast<std::uint32_t>(source_cap_.size()); }

  /// Adds to the source->node and node->sink capacities.
  void add_terminal(std::uint32_t node, double source_cap, double sink_cap);
  void add_arc(std::uint32_t from, std::uint32_t to, double capacity, double reverse_capacity = 0.0);

  [[nodiscard]] double source_capacity(std::uint32_t node) const { return source_cap_[node]; }
  [[nodiscard]] double sink_capacity(std::uint32_t node) const { return sink_cap_[node]; }
  [[nodiscard]] const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  std::vector<double> source_cap_;
  std::vector<double> sink_cap_;
  std::vector<Arc> arcs_;
};

struct MaxFlowResult {
  double flow = 0.0;
  /// 1 for nodes that can still reach the sink in the residual graph, 0 for
  /// everything else (including nodes cut off from both terminals).
  Labeling sink_side;
  std::uint64_t augmentations = 0;
};

/// Augmenting paths found by growing search trees from both terminals and
/// reusing them between augmentations.
[[nodiscard]] MaxFlowResult max_flow(const FlowGraph& graph);

/// Capacity of the cut that puts label-0 nodes with the source.
[[nodiscard]] double cut_capacity(const FlowGraph& graph, const Labeling& sink_side);

/// DIMACS max-flow text: nodes 1..n, source n+1, sink n+2.
[[nodiscard]] std::string to_dimacs(const FlowGraph& graph);

}  // namespace spmrf
