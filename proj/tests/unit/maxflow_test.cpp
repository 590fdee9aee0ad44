#include <doctest.h>

#include "spmrf/maxflow.hpp"
#include "test_support.hpp"

using namespace spmrf;
using namespace spmrf::testing;

namespace {

FlowGraph random_graph(Rng& rng, std::uint32_t n, int arcs, double hi) {
  FlowGraph g(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (uniform_int(rng, 0, 2) > 0) g.add_terminal(i, uniform(rng, 0, hi), uniform(rng, 0, hi));
  }
  for (int a = 0; a < arcs; ++a) {
    const auto i = static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
    const auto j = static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
    if (i == j) continue;
    g.add_arc(i, j, uniform(rng, 0, hi), uniform_int(rng, 0, 1) ? uniform(rng, 0, hi) : 0.0);
  }
  return g;
}

}  // namespace

TEST_CASE("chain s->A->B->t is limited by its bottleneck") {
  FlowGraph g(2);
  g.add_terminal(0, 2.0, 0.0);
  g.add_arc(0, 1, 1.0);
  g.add_terminal(1, 0.0, 2.0);
  const auto r = max_flow(g);
  CHECK(r.flow == 1.0);
  CHECK(cut_capacity(g, r.sink_side) == 1.0);
}

TEST_CASE("no arcs means no flow") {
  FlowGraph g(3);
  const auto r = max_flow(g);
  CHECK(r.flow == 0.0);
  CHECK(r.sink_side == Labeling(3));
  CHECK(max_flow(FlowGraph(0)).flow == 0.0);
}

TEST_CASE("parallel unit paths add up") {
  FlowGraph g(6);
  for (std::uint32_t i = 0; i < 3; ++i) {
    g.add_terminal(2 * i, 1.0, 0.0);
    g.add_arc(2 * i, 2 * i + 1, 1.0);
    g.add_terminal(2 * i + 1, 0.0, 1.0);
  }
  CHECK(max_flow(g).flow == 3.0);
}

TEST_CASE("direct terminal links on one node") {
  FlowGraph g(1);
  g.add_terminal(0, 3.0, 5.0);
  const auto r = max_flow(g);
  CHECK(r.flow == 3.0);
  CHECK(r.sink_side[0] == 1);
}

TEST_CASE("invalid capacities are rejected") {
  FlowGraph g(2);
  CHECK_THROWS_AS(g.add_arc(0, 1, -1.0), Error);
  CHECK_THROWS_AS(g.add_arc(0, 1, std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(g.add_arc(0, 2, 1.0), Error);
  CHECK_THROWS_AS(g.add_terminal(0, -0.5, 0.0), Error);
}

TEST_CASE("agrees with Edmonds-Karp and the enumerated minimum cut") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::uint32_t>(uniform_int(rng, 1, 12));
    const FlowGraph g = random_graph(rng, n, uniform_int(rng, 0, 40), 10.0);
    const auto r = max_flow(g);
    const double reference = edmonds_karp(g);
    const double enumerated = min_cut_by_enumeration(g);
    CHECK(r.flow == doctest::Approx(reference).epsilon(1e-9));
    CHECK(enumerated == doctest::Approx(reference).epsilon(1e-9));
    // The returned partition is a minimum cut: max-flow/min-cut duality.
    CHECK(cut_capacity(g, r.sink_side) == doctest::Approx(r.flow).epsilon(1e-9));
  }
}

TEST_CASE("integer capacities on larger graphs") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::uint32_t>(uniform_int(rng, 20, 80));
    FlowGraph g(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      g.add_terminal(i, uniform_int(rng, 0, 5), uniform_int(rng, 0, 5));
    }
    for (int a = 0; a < 4 * static_cast<int>(n); ++a) {
      const auto i = static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
      const auto j = static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
      if (i != j) g.add_arc(i, j, uniform_int(rng, 0, 4), uniform_int(rng, 0, 4));
    }
    const auto r = max_flow(g);
    CHECK(r.flow == edmonds_karp(g));
    CHECK(cut_capacity(g, r.sink_side) == r.flow);
  }
}

TEST_CASE("grid graphs of realistic size") {
  Rng rng(8);
  const int w = 60, h = 40;
  FlowGraph g(w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto p = static_cast<std::uint32_t>(y * w + x);
      g.add_terminal(p, uniform(rng, 0, 3), uniform(rng, 0, 3));
      if (x + 1 < w) g.add_arc(p, p + 1, uniform(rng, 0, 2), uniform(rng, 0, 2));
      if (y + 1 < h) g.add_arc(p, p + w, uniform(rng, 0, 2), uniform(rng, 0, 2));
    }
  }
  const auto r = max_flow(g);
  CHECK(cut_capacity(g, r.sink_side) == doctest::Approx(r.flow).epsilon(1e-9));
}

TEST_CASE("DIMACS export") {
  FlowGraph g(2);
  g.add_terminal(0, 2.0, 0.0);
  g.add_arc(0, 1, 1.0);
  g.add_terminal(1, 0.0, 2.0);
  const std::string text = to_dimacs(g);
  CHECK(text.find("p max 4 3\n") != std::string::npos);
  CHECK(text.find("n 3 s\n") != std::string::npos);
  CHECK(text.find("n 4 t\n") != std::string::npos);
  CHECK(text.find("a 3 1 2\n") != std::string::npos);
  CHECK(text.find("a 1 2 1\n") != std::string::npos);
  CHECK(text.find("a 2 4 2\n") != std::string::npos);
}
