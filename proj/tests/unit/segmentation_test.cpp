#include <doctest.h>

#include "spmrf/segmentation.hpp"
#include "spmrf/synthetic.hpp"
#include "test_support.hpp"

using namespace spmrf;
using namespace spmrf::testing;

namespace {

RgbImage two_color_image(const Mask& truth, float fg, float bg) {
  RgbImage img(truth.geometry);
  for (std::uint32_t p = 0; p < truth.bits.size(); ++p) {
    const float v = truth.bits[p] ? fg : bg;
    img.set(p, v, v, v);
  }
  return img;
}

SceneParams centred_rectangle(int w, int h) {
  SceneParams p;
  p.width = w;
  p.height = h;
  p.rx = 0.25;
  p.ry = 0.25;
  p.rectangle = true;
  return p;
}

}  // namespace

TEST_CASE("edge-map pairwise weights") {
  const GridGeometry g(3, 2);
  EdgeMap edges(g);
  edges.bits[g.index(1, 0)] = 1;
  const auto w = edge_pairwise_weights(edges);
  REQUIRE(w.size() == grid_pairs(g).size());
  for (const auto& t : w) {
    const bool touches = t.pair.p == g.index(1, 0) || t.pair.q == g.index(1, 0);
    CHECK(t.weight == (touches ? std::exp(-5.0) : 20.0));
  }
  CHECK(kOnEdgeWeight == doctest::Approx(0.0067379).epsilon(1e-5));
  for (const auto& t : edge_pairwise_weights(EdgeMap(g, 1))) CHECK(t.weight == kOnEdgeWeight);
}

TEST_CASE("seed unary signs and hard constraints") {
  const GridGeometry g(6, 1);
  RgbImage img(g);
  for (std::uint32_t p = 0; p < 6; ++p) {
    const float v = p < 3 ? 0.9f : 0.1f;
    img.set(p, v, v, v);
  }
  Seeds seeds;
  seeds.fg = {{0, 0}};
  seeds.bg = {{5, 0}};
  const auto w = seed_unary(img, seeds);
  // Same color as the fg seed only.
  CHECK(w[1] < 0.0);
  CHECK(w[4] > 0.0);

  double max_soft = 0.0;
  for (int p = 1; p < 5; ++p) max_soft = std::max(max_soft, std::abs(w[p]));
  const double m = hard_constraint_weight(max_soft);
  CHECK(w[0] == -m);
  CHECK(w[5] == m);

  seeds.box = PixelRect{0, 0, 3, 0};
  const auto boxed = seed_unary(img, seeds);
  CHECK(boxed[4] == m);
  CHECK(boxed[5] == m);
  CHECK(boxed[2] < 0.0);

  // Soft term by hand: per channel log((1+1)/(1+16)) - log(1/(1+16)) for the
  // fg bin, three channels.
  CHECK(w[1] == doctest::Approx(-3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("seed validation") {
  const GridGeometry g(4, 4);
  const RgbImage img(g);
  CHECK_THROWS_AS((void)seed_unary(img, Seeds{}), SeedError);
  CHECK_THROWS_AS((void)seed_unary(img, Seeds{{{0, 0}}, {{0, 0}}, std::nullopt}), SeedError);
  CHECK_THROWS_AS((void)seed_unary(img, Seeds{{{9, 0}}, {}, std::nullopt}), SeedError);
  CHECK_THROWS_AS((void)seed_unary(img, Seeds{{{3, 3}}, {}, PixelRect{0, 0, 1, 1}}), SeedError);
  CHECK_THROWS_AS((void)seed_unary(img, Seeds{{{0, 0}}, {}, PixelRect{2, 0, 1, 1}}), SeedError);
  CHECK_NOTHROW((void)seed_unary(img, Seeds{{}, {{1, 1}}, std::nullopt}));
}

TEST_CASE("seed merge is a sorted union with box replacement") {
  Seeds a{{{2, 1}, {0, 0}}, {{3, 3}}, PixelRect{0, 0, 3, 3}};
  a.merge(Seeds{{{0, 0}, {1, 0}}, {}, PixelRect{0, 0, 2, 2}});
  CHECK(a.fg == std::vector<Point>{{0, 0}, {1, 0}, {2, 1}});
  CHECK(a.bg == std::vector<Point>{{3, 3}});
  CHECK(a.box == PixelRect{0, 0, 2, 2});
  a.merge(Seeds{});
  CHECK(a.box == PixelRect{0, 0, 2, 2});
}

TEST_CASE("segmentation examples") {
  const GridGeometry g(6, 6);
  Rng rng(13);
  RgbImage img(g);
  for (std::uint32_t p = 0; p < g.pixel_count(); ++p) {
    img.set(p, static_cast<float>(uniform(rng, 0, 1)), static_cast<float>(uniform(rng, 0, 1)),
            static_cast<float>(uniform(rng, 0, 1)));
  }
  EdgeMap edges(g);
  for (auto& b : edges.bits) b = uniform_int(rng, 0, 3) == 0;

  SUBCASE("fg seeds on every pixel give an all-ones mask") {
    Seeds all;
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) all.fg.push_back({x, y});
    }
    CHECK(segment_superpixel(img, edges, all, random_partition(rng, g, 5)).mask.count() == 36);
    CHECK(segment_pixel(img, edges, all).mask.count() == 36);
  }
  SUBCASE("superpixel solve matches brute force on 6x6 with K=6") {
    const Seeds seeds{{{1, 1}}, {{4, 4}}, std::nullopt};
    for (int trial = 0; trial < 5; ++trial) {
      const auto part = random_partition(rng, g, 6);
      const auto r = segment_superpixel(img, edges, seeds, part);
      const auto sp = superpixelize_potts(build_segmentation_mrf(img, edges, seeds), part);
      const auto best = brute_force_minimize(sp.view());
      CHECK(r.solve.energy == doctest::Approx(best.energy).epsilon(1e-12));
      CHECK(r.node_count == 6);
    }
  }
  SUBCASE("pixel solve matches brute force on a 4x4 crop") {
    const GridGeometry small(4, 4);
    RgbImage crop(small);
    EdgeMap crop_edges(small);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        const auto p = g.index(x, y);
        crop.set(small.index(x, y), img.channels[0][p], img.channels[1][p], img.channels[2][p]);
        crop_edges.bits[small.index(x, y)] = edges.bits[p];
      }
    }
    const Seeds seeds{{{0, 0}}, {{3, 3}}, std::nullopt};
    const auto r = segment_pixel(crop, crop_edges, seeds);
    const auto best = brute_force_minimize(to_general(build_segmentation_mrf(crop, crop_edges, seeds)));
    CHECK(r.solve.energy == doctest::Approx(best.energy).epsilon(1e-12));
  }
  SUBCASE("identity partition matches the pixel path") {
    const Seeds seeds{{{2, 2}}, {{5, 0}}, std::nullopt};
    const auto a = segment_superpixel(img, edges, seeds, identity_partition(g));
    const auto b = segment_pixel(img, edges, seeds);
    CHECK(a.solve.energy == doctest::Approx(b.solve.energy).epsilon(1e-12));
  }
}

TEST_CASE("boundary-aligned partition reproduces the pixel-level mask") {
  const auto scene = make_two_region_scene(centred_rectangle(64, 64));
  const Seeds seeds{{{32, 32}}, {{2, 2}}, std::nullopt};
  const auto part = block_partition(scene.image.geometry, 8, 8);
  const auto sp = segment_superpixel(scene.image, scene.edges, seeds, part);
  const auto px = segment_pixel(scene.image, scene.edges, seeds);
  CHECK(sp.mask == px.mask);
  CHECK(overlap_ratio(sp.mask, scene.truth) == 1.0);
}

TEST_CASE("overlap ratio") {
  const GridGeometry g(4, 1);
  const Mask a(g, {1, 1, 0, 0});
  const Mask b(g, {0, 1, 1, 0});
  CHECK(overlap_ratio(a, a) == 1.0);
  CHECK(overlap_ratio(a, Mask(g, {0, 0, 1, 1})) == 0.0);
  CHECK(overlap_ratio(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(overlap_ratio(a, b) == overlap_ratio(b, a));
  CHECK(overlap_ratio(Mask(g), Mask(g)) == 1.0);
  CHECK_THROWS_AS((void)overlap_ratio(a, Mask(GridGeometry(2, 2))), DimensionError);
}

TEST_CASE("squared distance transform matches brute force") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const GridGeometry g(uniform_int(rng, 1, 15), uniform_int(rng, 1, 15));
    BinaryMap f(g);
    for (auto& b : f.bits) b = uniform_int(rng, 0, 5) == 0;
    const auto dt = squared_distance_transform(f);
    for (std::uint32_t p = 0; p < g.pixel_count(); ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t q = 0; q < g.pixel_count(); ++q) {
        if (!f.bits[q]) continue;
        const double dx = g.x_of(p) - g.x_of(q);
        const double dy = g.y_of(p) - g.y_of(q);
        best = std::min(best, dx * dx + dy * dy);
      }
      CHECK(dt[p] == best);
    }
  }
}

TEST_CASE("boundary deviation") {
  const GridGeometry g(20, 20);
  const Mask truth = rect_mask(g, 5, 5, 14, 14);
  CHECK(boundary_deviation(truth, truth) == 0.0);

  const Mask shifted = rect_mask(g, 6, 5, 15, 14);
  CHECK(boundary_deviation(shifted, truth) ==
        doctest::Approx(boundary_deviation_brute_force(shifted, truth)).epsilon(1e-12));
  CHECK(boundary_deviation(shifted, truth) == doctest::Approx(1.0).epsilon(0.3));

  for (int d = 1; d <= 3; ++d) {
    const Mask inner = rect_mask(g, 5 + d, 5 + d, 14 - d, 14 - d);
    const double got = boundary_deviation(inner, truth);
    CHECK(got == doctest::Approx(boundary_deviation_brute_force(inner, truth)).epsilon(1e-12));
    CHECK(got == doctest::Approx(d).epsilon(0.25));
  }

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Mask a(g), b(g);
    for (auto& v : a.bits) v = uniform_int(rng, 0, 1);
    for (auto& v : b.bits) v = uniform_int(rng, 0, 1);
    if (mask_boundary(a).count() == 0 || mask_boundary(b).count() == 0) continue;
    CHECK(boundary_deviation(a, b) ==
          doctest::Approx(boundary_deviation_brute_force(a, b)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)boundary_deviation(Mask(g), truth), Error);
}

TEST_CASE("robot user") {
  const GridGeometry g(12, 10);
  SUBCASE("converged masks give no seed") {
    const Mask truth = rect_mask(g, 2, 2, 6, 6);
    CHECK_FALSE(robot_user(truth, truth, 2).has_value());
  }
  SUBCASE("empty mask places a fg disk at the deepest blob pixel") {
    const Mask truth = rect_mask(g, 2, 1, 8, 7);
    const auto seeds = robot_user(Mask(g), truth, 1);
    REQUIRE(seeds.has_value());
    CHECK(seeds->bg.empty());
    // Oracle: exhaustive distance to the nearest pixel outside the blob,
    // counting the virtual ring just outside the image; first in raster order.
    double best = -1.0;
    Point centre;
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) {
        if (!truth.at(x, y)) continue;
        double d = std::numeric_limits<double>::infinity();
        for (int yy = -1; yy <= g.height; ++yy) {
          for (int xx = -1; xx <= g.width; ++xx) {
            if (g.contains(xx, yy) && truth.at(xx, yy)) continue;
            d = std::min(d, double((x - xx) * (x - xx) + (y - yy) * (y - yy)));
          }
        }
        if (d > best) {
          best = d;
          centre = {x, y};
        }
      }
    }
    CHECK(centre == Point{5, 4});
    std::vector<Point> expected;
    for (int y = centre.y - 1; y <= centre.y + 1; ++y) {
      for (int x = centre.x - 1; x <= centre.x + 1; ++x) {
        if (std::abs(x - centre.x) + std::abs(y - centre.y) <= 1) expected.push_back({x, y});
      }
    }
    std::vector<Point> got = seeds->fg;
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);
  }
  SUBCASE("largest misclassified component wins") {
    Mask truth(g);
    Mask current(g);
    // size-10 false positive and size-3 false negative
    for (int x = 0; x < 10; ++x) current.bits[g.index(x, 8)] = 1;
    for (int x = 9; x < 12; ++x) {
      truth.bits[g.index(x, 1)] = 1;
    }
    const auto seeds = robot_user(current, truth, 0);
    REQUIRE(seeds.has_value());
    REQUIRE(seeds->bg.size() == 1);
    CHECK(seeds->fg.empty());
    CHECK(seeds->bg[0].y == 8);
  }
  SUBCASE("disk never crosses the truth boundary") {
    const Mask truth = rect_mask(g, 3, 3, 5, 5);
    const auto seeds = robot_user(Mask(g, 1), truth, 6);
    REQUIRE(seeds.has_value());
    CHECK(seeds->fg.empty());
    for (const auto& p : seeds->bg) CHECK_FALSE(truth.at(p.x, p.y));
  }
}

TEST_CASE("user effort") {
  const std::vector<Point> one{{4, 4}};
  CHECK(user_effort(one) == 0.0);
  const std::vector<Point> two{{0, 0}, {3, 4}};
  CHECK(user_effort(two) == 5.0);
  const std::vector<Point> three{{7, 0}, {0, 0}, {3, 0}};
  CHECK(user_effort(three) == 7.0);
  CHECK_THROWS_AS((void)user_effort(std::span<const Point>{}), Error);

  // Against enumeration of all spanning trees on four points (Prüfer-free:
  // every 3-edge subset that connects the points).
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts(4);
    for (auto& p : pts) p = {uniform_int(rng, 0, 20), uniform_int(rng, 0, 20)};
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) all.emplace_back(i, j);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 64; ++mask) {
      if (__builtin_popcount(mask) != 3) continue;
      int comp[4] = {0, 1, 2, 3};
      double w = 0.0;
      for (int e = 0; e < 6; ++e) {
        if (!(mask >> e & 1)) continue;
        const auto [i, j] = all[e];
        w += std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        const int from = comp[j], to = comp[i];
        for (int& c : comp) c = c == from ? to : c;
      }
      if (comp[0] == comp[1] && comp[1] == comp[2] && comp[2] == comp[3]) best = std::min(best, w);
    }
    bool distinct = true;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) distinct &= !(pts[i] == pts[j]);
    }
    if (!distinct) continue;
    CHECK(user_effort(pts) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("gradient edge map marks the strongest transitions") {
  const auto scene = make_two_region_scene(centred_rectangle(32, 32));
  const auto edges = gradient_edge_map(scene.image);
  CHECK(edges.count() > 0);
  for (std::uint32_t p = 0; p < edges.bits.size(); ++p) {
    if (edges.bits[p]) CHECK(scene.edges.bits[p] == 1);
  }
  CHECK(gradient_edge_map(two_color_image(Mask(GridGeometry(5, 5)), 0.5f, 0.5f)).count() == 0);
}
