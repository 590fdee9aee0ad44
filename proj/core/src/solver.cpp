#include "spmrf/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace spmrf {

StGraph build_st_graph(const MrfView& mrf) {
  const auto n = static_cast<std::uint32_t>(mrf.node_count());
  StGraph out{FlowGraph(n), mrf.constant};
  std::vector<double> cost_of_one(mrf.unary.begin(), mrf.unary.end());

  for (std::size_t t = 0; t < mrf.terms.size(); ++t) {
    const auto& term = mrf.terms[t];
    if (term.first >= n || term.second >= n || term.first == term.second) {
      throw DimensionError("term " + std::to_string(t) + " has invalid endpoints");
    }
    const auto& w = term.weights;
    double lambda = w.regularity_margin();
    if (lambda < -kSubmodularTolerance) {
      throw NotSubmodularError("term " + std::to_string(t) + " (" + std::to_string(term.first) +
                               "," + std::to_string(term.second) + ") violates submodularity by " +
                               std::to_string(-lambda));
    }
    if (lambda < 0.0) lambda = 0.0;
    out.offset += w.w00;
    cost_of_one[term.first] += w.w10 - w.w00;
    cost_of_one[term.second] += w.w11 - w.w10;
    if (lambda > 0.0) out.graph.add_arc(term.first, term.second, lambda, 0.0);
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = cost_of_one[i];
    if (a > 0.0) {
      out.graph.add_terminal(i, a, 0.0);
    } else if (a < 0.0) {
      out.offset += a;
      out.graph.add_terminal(i, 0.0, -a);
    }
  }
  return out;
}

SolveResult solve(const MrfView& mrf) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const StGraph st = build_st_graph(mrf);
  const auto t1 = clock::now();
  MaxFlowResult flow = max_flow(st.graph);
  const auto t2 = clock::now();

  SolveResult result;
  result.energy = energy(mrf, flow.sink_side);
  result.labeling = std::move(flow.sink_side);
  result.flow = flow.flow;
  result.offset = st.offset;
  result.stats.augmentations = flow.augmentations;
  result.stats.build_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.stats.flow_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  return result;
}

}  // namespace spmrf
