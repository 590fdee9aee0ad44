#pragma once

#include <cstdint>

#include "spmrf/maxflow.hpp"
#include "spmrf/mrf.hpp"
#include "spmrf/superpixelizer.hpp"

namespace spmrf {

/// s-t graph whose min-cut value plus `offset` equals the minimum energy.
/// Label 1 corresponds to the sink side.
struct StGraph {
  FlowGraph graph;
  double offset = 0.0;
};

/// Reparameterizes each term as
///   w00 + (w10 - w00) x_i + (w11 - w10) x_j + (w01 + w10 - w00 - w11) (1 - x_i) x_j
/// and routes every unary coefficient to the terminal whose side pays it.
/// Throws NotSubmodularError naming the first offending term.
[[nodiscard]] StGraph build_st_graph(const MrfView& mrf);

struct SolveStats {
  std::uint64_t augmentations = 0;
  double build_ms = 0.0;
  double flow_ms = 0.0;
};

struct SolveResult {
  Labeling labeling;
  double energy = 0.0;  // the energy re-evaluated on `labeling`
  double flow = 0.0;
  double offset = 0.0;
  SolveStats stats;
};

[[nodiscard]] SolveResult solve(const MrfView& mrf);
[[nodiscard]] inline SolveResult solve(const PixelMrf& mrf) { return solve(mrf.view()); }
[[nodiscard]] inline SolveResult solve(const SuperpixelMrf& mrf) { return solve(mrf.view()); }

}  // namespace spmrf
