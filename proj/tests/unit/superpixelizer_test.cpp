#include <doctest.h>

#include "spmrf/fixture.hpp"
#include "spmrf/superpixelizer.hpp"
#include "test_support.hpp"

using namespace spmrf;
using namespace spmrf::testing;

namespace {

// Exhaustive check of sp_energy(x) == energy(lift(x)) over all labelings.
double max_equivalence_gap(const PixelMrf& mrf, const SuperpixelPartition& part,
                           const SuperpixelMrf& sp) {
  double worst = 0.0;
  const std::size_t k = part.count();
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); ++v) {
    const Labeling x = labeling_from_bits(v, k);
    const double pixel = energy(mrf, lift(x, part));
    worst = std::max(worst, std::abs(sp_energy(sp, x) - pixel) / (1.0 + std::abs(pixel)));
  }
  return worst;
}

}  // namespace

TEST_CASE("identity partition reproduces the pixel MRF exactly") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const GridGeometry g(uniform_int(rng, 1, 7), uniform_int(rng, 1, 7));
    const PixelMrf mrf = random_mrf(rng, g);
    const auto [sp, report] = superpixelize(mrf, identity_partition(g));
    CHECK(sp.node_count == g.pixel_count());
    CHECK(sp.unary == mrf.unary);
    CHECK(sp.edges == mrf.pairs);
    CHECK(sp.constant == mrf.constant);
    CHECK(fixture_body(write_fixture(sp)) == fixture_body(write_fixture(mrf)));
    CHECK(report.total_pairs() == mrf.pairs.size());
  }
}

TEST_CASE("single superpixel over the two-pixel instance") {
  const auto mrf = build_grid_mrf(GridGeometry(2, 1), {1.0, -2.0},
                                  [](const NeighborPair&) { return PairwiseWeights{0, 3, 1, 0}; });
  const SuperpixelPartition part(GridGeometry(2, 1), {0, 0});
  const auto [sp, report] = superpixelize(mrf, part);
  CHECK(sp.node_count == 1);
  CHECK(sp.unary == std::vector<double>{-1.0});
  CHECK(sp.edges.empty());
  CHECK(sp.constant == 0.0);
  CHECK(sp_energy(sp, Labeling({1})) == -1.0);
  CHECK(sp_energy(sp, Labeling({1})) == energy(mrf, lift(Labeling({1}), part)));
  CHECK(sp_energy(sp, Labeling({0})) == energy(mrf, lift(Labeling({0}), part)));
  CHECK(report.interior_pairs[0] == 1);
}

TEST_CASE("1x3 grid split {0},{1,2}") {
  // Interior pair (1,2) contributes w00 to the constant and w11 - w00 to the unary.
  const GridGeometry g(3, 1);
  PixelMrf mrf;
  mrf.geometry = g;
  mrf.unary = {0.5, -1.25, 2.0};
  mrf.pairs = {{0, 1, {1.0, 2.0, 3.0, 4.0}}, {1, 2, {-1.0, 0.5, 0.25, 3.0}}};
  mrf.constant = 0.75;
  const SuperpixelPartition part(g, {0, 1, 1});
  const auto [sp, report] = superpixelize(mrf, part);
  CHECK(sp.unary[0] == 0.5);
  CHECK(sp.unary[1] == doctest::Approx(0.75 + 1.0 + 3.0));
  CHECK(sp.constant == doctest::Approx(0.75 - 1.0));
  REQUIRE(sp.edges.size() == 1);
  CHECK(sp.edges[0].weights == PairwiseWeights{1.0, 2.0, 3.0, 4.0});
  CHECK(max_equivalence_gap(mrf, part, sp) <= 1e-12);
}

TEST_CASE("pairs pointing from the larger to the smaller superpixel are swapped") {
  const GridGeometry g(2, 1);
  PixelMrf mrf;
  mrf.geometry = g;
  mrf.unary = {0, 0};
  mrf.pairs = {{0, 1, {1.0, 2.0, 3.0, 4.0}}};
  const SuperpixelPartition part(g, {1, 0});
  const auto [sp, report] = superpixelize(mrf, part);
  REQUIRE(sp.edges.size() == 1);
  CHECK(sp.edges[0].first == 0);
  CHECK(sp.edges[0].second == 1);
  CHECK(sp.edges[0].weights == PairwiseWeights{1.0, 3.0, 2.0, 4.0});
  CHECK(max_equivalence_gap(mrf, part, sp) == 0.0);
}

TEST_CASE("exact equivalence on random instances (exhaustive over superpixel labelings)") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const GridGeometry g(uniform_int(rng, 1, 8), uniform_int(rng, 1, 8));
    const auto k = static_cast<std::uint32_t>(
        uniform_int(rng, 1, std::min<int>(10, static_cast<int>(g.pixel_count()))));
    const PixelMrf mrf = random_mrf(rng, g);
    const auto part = random_partition(rng, g, k);
    const auto [sp, report] = superpixelize(mrf, part);
    CHECK(max_equivalence_gap(mrf, part, sp) <= 1e-9);
    CHECK(report.total_pairs() == mrf.pairs.size());
    for (const auto& e : sp.edges) CHECK(e.first < e.second);
  }
}

TEST_CASE("equivalence by sampling for larger K") {
  Rng rng(100);
  const GridGeometry g(30, 20);
  const PixelMrf mrf = random_mrf(rng, g);
  const auto part = random_partition(rng, g, 150);
  const auto [sp, report] = superpixelize(mrf, part);
  for (int i = 0; i < 200; ++i) {
    Labeling x(part.count());
    for (std::size_t k = 0; k < x.size(); ++k) x.set(k, uniform_int(rng, 0, 1));
    const double pixel = energy(mrf, lift(x, part));
    CHECK(std::abs(sp_energy(sp, x) - pixel) <= 1e-9 * (1.0 + std::abs(pixel)));
  }
}

TEST_CASE("sp_energy at all-zero labels is C plus the summed w00 of edges") {
  Rng rng(5);
  const GridGeometry g(6, 6);
  const PixelMrf mrf = random_mrf(rng, g);
  const auto [sp, report] = superpixelize(mrf, random_partition(rng, g, 7));
  double expected = sp.constant;
  for (const auto& e : sp.edges) expected += e.weights.w00;
  CHECK(sp_energy(sp, Labeling(sp.node_count)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS((void)sp_energy(sp, Labeling(sp.node_count + 1)), DimensionError);
}

TEST_CASE("submodularity carries over to every superpixel edge") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const GridGeometry g(uniform_int(rng, 2, 9), uniform_int(rng, 2, 9));
    const PixelMrf mrf = random_mrf(rng, g, -5, 5, true);
    REQUIRE(is_submodular(mrf));
    const auto part =
        random_partition(rng, g, uniform_int(rng, 1, static_cast<int>(g.pixel_count())));
    const auto [sp, report] = superpixelize(mrf, part);
    CHECK(check_submodular(sp.edges).submodular);
  }
}

TEST_CASE("pairwise residuals") {
  Rng rng(77);
  SUBCASE("identity partition gives exact zeros") {
    const GridGeometry g(5, 4);
    const PixelMrf mrf = random_mrf(rng, g);
    const auto part = identity_partition(g);
    const auto sp = superpixelize(mrf, part).mrf;
    for (const auto& r : pairwise_residuals(mrf, part, sp)) CHECK(r.max() == 0.0);
  }
  SUBCASE("random 6x6 instance with K=5") {
    const GridGeometry g(6, 6);
    const PixelMrf mrf = random_mrf(rng, g);
    const auto part = random_partition(rng, g, 5);
    const auto sp = superpixelize(mrf, part).mrf;
    const auto residuals = pairwise_residuals(mrf, part, sp);
    CHECK(residuals.size() == adjacency(part, grid_pairs(g)).size());
    double worst = 0.0;
    for (const auto& r : residuals) worst = std::max(worst, r.max());
    CHECK(worst <= 1e-9);
  }
  SUBCASE("zero pairwise weights") {
    const GridGeometry g(4, 4);
    const auto mrf = build_grid_mrf(g, std::vector<double>(16, 1.0),
                                    [](const NeighborPair&) { return PairwiseWeights{}; });
    const auto part = random_partition(rng, g, 4);
    for (const auto& r : pairwise_residuals(mrf, part, superpixelize(mrf, part).mrf)) {
      CHECK(r.max() == 0.0);
    }
  }
  SUBCASE("a corrupted edge is detected") {
    const GridGeometry g(4, 4);
    const PixelMrf mrf = random_mrf(rng, g);
    const auto part = random_partition(rng, g, 3);
    auto sp = superpixelize(mrf, part).mrf;
    REQUIRE_FALSE(sp.edges.empty());
    sp.edges[0].weights.w01 += 0.5;
    double worst = 0.0;
    for (const auto& r : pairwise_residuals(mrf, part, sp)) worst = std::max(worst, r.max());
    CHECK(worst == doctest::Approx(0.5));
  }
}

TEST_CASE("Potts fast path") {
  SUBCASE("zero pairwise weights leave per-superpixel unary sums") {
    const GridGeometry g(3, 2);
    PottsMrf potts{g, {1, 2, 3, 4, 5, 6}, {}, 0.0};
    for (const auto& np : grid_pairs(g)) potts.pairs.push_back({np, 0.0});
    const SuperpixelPartition part(g, {0, 0, 1, 0, 1, 1});
    const auto sp = superpixelize_potts(potts, part);
    CHECK(sp.unary == std::vector<double>{7.0, 14.0});
    for (const auto& e : sp.edges) CHECK(e.weights == PairwiseWeights{});
  }
  SUBCASE("single pair on the identity partition") {
    const GridGeometry g(2, 1);
    const PottsMrf potts{g, {0, 0}, {{{0, 1}, 2.0}}, 0.0};
    const auto sp = superpixelize_potts(potts, identity_partition(g));
    REQUIRE(sp.edges.size() == 1);
    CHECK(sp.edges[0].weights == PairwiseWeights{0, 2, 2, 0});
  }
  SUBCASE("two crossing pairs between left and right columns") {
    const GridGeometry g(2, 2);
    PottsMrf potts{g, {0, 0, 0, 0}, {}, 0.0};
    for (const auto& np : grid_pairs(g)) potts.pairs.push_back({np, 1.0});
    const auto sp = superpixelize_potts(potts, SuperpixelPartition(g, {0, 1, 0, 1}));
    REQUIRE(sp.edges.size() == 1);
    CHECK(sp.edges[0].weights.w01 == 2.0);
    CHECK(sp.edges[0].weights.w10 == 2.0);
  }
  SUBCASE("agrees with the general path") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
      const GridGeometry g(uniform_int(rng, 1, 12), uniform_int(rng, 1, 12));
      const PottsMrf potts = random_potts(rng, g);
      const auto part =
          random_partition(rng, g, uniform_int(rng, 1, static_cast<int>(g.pixel_count())));
      const auto fast = superpixelize_potts(potts, part);
      const auto general = superpixelize(to_general(potts), part).mrf;
      REQUIRE(fast.edges.size() == general.edges.size());
      for (std::size_t k = 0; k < fast.unary.size(); ++k) {
        CHECK(std::abs(fast.unary[k] - general.unary[k]) <= 1e-12);
      }
      for (std::size_t e = 0; e < fast.edges.size(); ++e) {
        CHECK(fast.edges[e].first == general.edges[e].first);
        CHECK(fast.edges[e].second == general.edges[e].second);
        CHECK(std::abs(fast.edges[e].weights.w01 - general.edges[e].weights.w01) <= 1e-12);
        CHECK(std::abs(fast.edges[e].weights.w10 - general.edges[e].weights.w10) <= 1e-12);
      }
      CHECK(fast.constant == general.constant);
    }
  }
}

TEST_CASE("lift examples and errors") {
  CHECK(lift(Labeling({1, 0}), identity_partition(GridGeometry(2, 1))) == Labeling({1, 0}));
  const SuperpixelPartition one(GridGeometry(2, 2), {0, 0, 0, 0});
  CHECK(lift(Labeling({1}), one) == Labeling({1, 1, 1, 1}));
  CHECK_THROWS_AS((void)lift(Labeling(2), one), DimensionError);
  CHECK_THROWS_AS((void)restrict_to_superpixels(Labeling({1, 0, 0, 0}), one), DimensionError);
}

TEST_CASE("superpixel minimizer lifts to the best superpixel-constant pixel labeling") {
  Rng rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    const GridGeometry g(uniform_int(rng, 2, 6), uniform_int(rng, 2, 6));
    const PixelMrf mrf = random_mrf(rng, g);
    const auto part = random_partition(
        rng, g, uniform_int(rng, 1, std::min<int>(10, static_cast<int>(g.pixel_count()))));
    const auto sp = superpixelize(mrf, part).mrf;
    const auto best = brute_force_minimize(sp.view());
    double best_pixel = std::numeric_limits<double>::infinity();
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << part.count()); ++v) {
      best_pixel = std::min(best_pixel, energy(mrf, lift(labeling_from_bits(v, part.count()), part)));
    }
    const double lifted = energy(mrf, lift(best.labeling, part));
    CHECK(lifted == doctest::Approx(best_pixel).epsilon(1e-12));
  }
}

TEST_CASE("geometry mismatch is rejected") {
  Rng rng(1);
  const PixelMrf mrf = random_mrf(rng, GridGeometry(3, 3));
  CHECK_THROWS_AS((void)superpixelize(mrf, identity_partition(GridGeometry(3, 2))), DimensionError);
}
