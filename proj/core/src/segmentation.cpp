#include "spmrf/segmentation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>
#include <string>
#include <tuple>

namespace spmrf {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": geometry mismatch");
}

void sort_unique(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[k]] == kInf) {
      v[k] = q;
      continue;
    }
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = f[v[k]] == kInf ? kInf : dq * dq + f[v[k]];
  }
}

}  // namespace

void Seeds::validate(const GridGeometry& geometry) const {
  if (box) {
    if (box->x0 > box->x1 || box->y0 > box->y1) throw SeedError("box corners are inverted");
    if (!geometry.contains(box->x0, box->y0) || !geometry.contains(box->x1, box->y1)) {
      throw SeedError("box lies outside the image");
    }
  }
  std::vector<std::uint8_t> mark(geometry.pixel_count(), 0);
  for (const auto& p : fg) {
    if (!geometry.contains(p.x, p.y)) throw SeedError("foreground seed outside the image");
    if (box && !box->contains(p.x, p.y)) throw SeedError("foreground seed outside the box");
    mark[geometry.index(p.x, p.y)] = 1;
  }
  for (const auto& p : bg) {
    if (!geometry.contains(p.x, p.y)) throw SeedError("background seed outside the image");
    if (mark[geometry.index(p.x, p.y)]) {
      throw SeedError("pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                      ") is seeded as both foreground and background");
    }
  }
}

void Seeds::merge(const Seeds& increment) {
  fg.insert(fg.end(), increment.fg.begin(), increment.fg.end());
  bg.insert(bg.end(), increment.bg.begin(), increment.bg.end());
  sort_unique(fg);
  sort_unique(bg);
  if (increment.box) box = increment.box;
}

std::vector<Point> Seeds::all_points() const {
  std::vector<Point> pts = fg;
  pts.insert(pts.end(), bg.begin(), bg.end());
  sort_unique(pts);
  return pts;
}

BinaryMap::BinaryMap(GridGeometry g, std::vector<std::uint8_t> b) : geometry(g), bits(std::move(b)) {
  if (bits.size() != g.pixel_count()) throw DimensionError("binary map size does not match grid");
  for (auto& v : bits) v = v ? 1 : 0;
}

std::size_t BinaryMap::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<PottsTerm> edge_pairwise_weights(const EdgeMap& edges) {
  const auto pairs = grid_pairs(edges.geometry);
  std::vector<PottsTerm> out;
  out.reserve(pairs.size());
  for (const auto& np : pairs) {
    const bool on_edge = edges.bits[np.p] || edges.bits[np.q];
    out.push_back({np, on_edge ? kOnEdgeWeight : kOffEdgeWeight});
  }
  return out;
}

EdgeMap gradient_edge_map(const RgbImage& image) {
  const GridGeometry& g = image.geometry;
  const std::size_t n = g.pixel_count();
  std::vector<double> lum(n);
  for (std::size_t p = 0; p < n; ++p) {
    lum[p] = 0.299 * image.channels[0][p] + 0.587 * image.channels[1][p] +
             0.114 * image.channels[2][p];
  }
  std::vector<double> mag(n);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const auto at = [&](int xx, int yy) {
        return lum[g.index(std::clamp(xx, 0, g.width - 1), std::clamp(yy, 0, g.height - 1))];
      };
      const double gx = 0.5 * (at(x + 1, y) - at(x - 1, y));
      const double gy = 0.5 * (at(x, y + 1) - at(x, y - 1));
      mag[g.index(x, y)] = std::sqrt(gx * gx + gy * gy);
    }
  }
  std::vector<double> sorted = mag;
  const std::size_t rank = static_cast<std::size_t>(0.9 * static_cast<double>(n - 1));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
  const double threshold = sorted[rank];
  EdgeMap edges(g);
  for (std::size_t p = 0; p < n; ++p) edges.bits[p] = (mag[p] > 0.0 && mag[p] >= threshold) ? 1 : 0;
  return edges;
}

std::vector<double> seed_unary(const RgbImage& image, const Seeds& seeds, const UnaryParams& params) {
  const GridGeometry& g = image.geometry;
  if (seeds.empty()) throw SeedError("at least one seed is required");
  if (params.bins < 1) throw SeedError("histogram needs at least one bin");
  seeds.validate(g);

  const int bins = params.bins;
  const auto bin_of = [bins](float v) {
    return std::clamp(static_cast<int>(v * static_cast<float>(bins)), 0, bins - 1);
  };
  // log-likelihood tables per channel and bin
  const auto log_table = [&](const std::vector<Point>& pts) {
    std::array<std::vector<double>, 3> table;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
      for (const auto& pt : pts) hist[bin_of(image.channels[c][g.index(pt.x, pt.y)])] += 1.0;
      const double denom = static_cast<double>(pts.size()) + bins * params.smoothing;
      table[c].resize(hist.size());
      for (std::size_t b = 0; b < hist.size(); ++b) {
        table[c][b] = std::log((hist[b] + params.smoothing) / denom);
      }
    }
    return table;
  };
  const auto fg_log = log_table(seeds.fg);
  const auto bg_log = log_table(seeds.bg);

  const std::size_t n = g.pixel_count();
  std::vector<double> unary(n);
  double max_abs = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double llr = 0.0;
    for (int c = 0; c < 3; ++c) {
      const int b = bin_of(image.channels[c][p]);
      llr += bg_log[c][b] - fg_log[c][b];
    }
    unary[p] = params.lambda * llr;
    max_abs = std::max(max_abs, std::abs(unary[p]));
  }

  const double m = hard_constraint_weight(max_abs);
  if (seeds.box) {
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) {
        if (!seeds.box->contains(x, y)) unary[g.index(x, y)] = m;
      }
    }
  }
  for (const auto& pt : seeds.fg) unary[g.index(pt.x, pt.y)] = -m;
  for (const auto& pt : seeds.bg) unary[g.index(pt.x, pt.y)] = m;
  return unary;
}

PottsMrf build_segmentation_mrf(const RgbImage& image, const EdgeMap& edges, const Seeds& seeds,
                                const UnaryParams& params) {
  require_same_geometry(image.geometry, edges.geometry, "edge map");
  PottsMrf potts;
  potts.geometry = image.geometry;
  potts.unary = seed_unary(image, seeds, params);
  potts.pairs = edge_pairwise_weights(edges);
  return potts;
}

SegmentResult segment_superpixel(const RgbImage& image, const EdgeMap& edges, const Seeds& seeds,
                                 const SuperpixelPartition& partition, const UnaryParams& params) {
  require_same_geometry(image.geometry, partition.geometry(), "partition");
  const auto t0 = Clock::now();
  const PottsMrf potts = build_segmentation_mrf(image, edges, seeds, params);
  const auto t1 = Clock::now();
  const SuperpixelMrf sp = superpixelize_potts(potts, partition);
  const auto t2 = Clock::now();
  SegmentResult r;
  r.solve = solve(sp);
  const auto t3 = Clock::now();
  r.mask = Mask(image.geometry);
  const Labeling pixels = lift(r.solve.labeling, partition);
  std::copy(pixels.bits().begin(), pixels.bits().end(), r.mask.bits.begin());
  r.node_count = sp.node_count;
  r.timings = {ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3), ms_between(t0, Clock::now())};
  return r;
}

SegmentResult segment_pixel(const RgbImage& image, const EdgeMap& edges, const Seeds& seeds,
                            const UnaryParams& params) {
  const auto t0 = Clock::now();
  const PixelMrf mrf = to_general(build_segmentation_mrf(image, edges, seeds, params));
  const auto t1 = Clock::now();
  SegmentResult r;
  r.solve = solve(mrf);
  const auto t2 = Clock::now();
  r.mask = Mask(image.geometry);
  std::copy(r.solve.labeling.bits().begin(), r.solve.labeling.bits().end(), r.mask.bits.begin());
  r.node_count = static_cast<std::uint32_t>(mrf.unary.size());
  r.timings = {ms_between(t0, t1), 0.0, ms_between(t1, t2), ms_between(t0, Clock::now())};
  return r;
}

double overlap_ratio(const Mask& result, const Mask& truth) {
  require_same_geometry(result.geometry, truth.geometry, "overlap_ratio");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t p = 0; p < result.bits.size(); ++p) {
    inter += result.bits[p] && truth.bits[p];
    uni += result.bits[p] || truth.bits[p];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Mask mask_boundary(const Mask& mask) {
  const GridGeometry& g = mask.geometry;
  Mask out(g);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      if (!mask.at(x, y)) continue;
      const bool touches_bg = (x > 0 && !mask.at(x - 1, y)) || (x + 1 < g.width && !mask.at(x + 1, y)) ||
                              (y > 0 && !mask.at(x, y - 1)) || (y + 1 < g.height && !mask.at(x, y + 1));
      out.bits[g.index(x, y)] = touches_bg ? 1 : 0;
    }
  }
  return out;
}

std::vector<double> squared_distance_transform(const BinaryMap& features) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const GridGeometry& g = features.geometry;
  const int w = g.width;
  const int h = g.height;
  std::vector<double> grid(g.pixel_count());
  for (std::size_t p = 0; p < grid.size(); ++p) grid[p] = features.bits[p] ? 0.0 : kInf;

  const int longest = std::max(w, h);
  std::vector<double> f(longest), d(longest);
  std::vector<int> v(longest);
  std::vector<double> z(longest + 1);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[g.index(x, y)];
    edt_1d(f.data(), d.data(), h, v, z);
    for (int y = 0; y < h; ++y) grid[g.index(x, y)] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = grid[g.index(x, y)];
    edt_1d(f.data(), d.data(), w, v, z);
    for (int x = 0; x < w; ++x) grid[g.index(x, y)] = d[x];
  }
  return grid;
}

double boundary_deviation(const Mask& result, const Mask& truth) {
  require_same_geometry(result.geometry, truth.geometry, "boundary_deviation");
  const Mask rb = mask_boundary(result);
  const Mask tb = mask_boundary(truth);
  const std::size_t rn = rb.count();
  const std::size_t tn = tb.count();
  if (rn == 0 || tn == 0) throw Error("boundary_deviation: a mask has an empty boundary");

  const auto directed = [](const Mask& from, const Mask& to, std::size_t count) {
    const auto dt = squared_distance_transform(to);
    double sum = 0.0;
    for (std::size_t p = 0; p < from.bits.size(); ++p) {
      if (from.bits[p]) sum += std::sqrt(dt[p]);
    }
    return sum / static_cast<double>(count);
  };
  return 0.5 * (directed(rb, tb, rn) + directed(tb, rb, tn));
}

std::optional<Seeds> robot_user(const Mask& current, const Mask& truth, int step) {
  require_same_geometry(current.geometry, truth.geometry, "robot_user");
  if (step < 0) throw SeedError("robot step must be non-negative");
  const GridGeometry& g = truth.geometry;
  const std::size_t n = g.pixel_count();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

  // Largest 4-connected region of wrong pixels sharing one truth label.
  std::vector<std::uint32_t> component(n, kUnset);
  std::uint32_t best_id = kUnset;
  std::size_t best_size = 0;
  std::uint32_t id = 0;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (component[start] != kUnset || current.bits[start] == truth.bits[start]) continue;
    std::size_t size = 0;
    component[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      ++size;
      const int x = g.x_of(p);
      const int y = g.y_of(p);
      const Point nbr[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const auto& q : nbr) {
        if (!g.contains(q.x, q.y)) continue;
        const std::uint32_t qi = g.index(q.x, q.y);
        if (component[qi] == kUnset && current.bits[qi] != truth.bits[qi] &&
            truth.bits[qi] == truth.bits[start]) {
          component[qi] = id;
          stack.push_back(qi);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_id = id;
    }
    ++id;
  }
  if (best_id == kUnset) return std::nullopt;

  BinaryMap outside(g);
  for (std::size_t p = 0; p < n; ++p) outside.bits[p] = component[p] == best_id ? 0 : 1;
  const auto dt = squared_distance_transform(outside);
  std::uint32_t deepest = kUnset;
  double deepest_d = -1.0;
  for (std::uint32_t p = 0; p < n; ++p) {
    if (component[p] != best_id) continue;
    const double bx = std::min(g.x_of(p) + 1, g.width - g.x_of(p));
    const double by = std::min(g.y_of(p) + 1, g.height - g.y_of(p));
    const double d = std::min({dt[p], bx * bx, by * by});
    if (d > deepest_d) {
      deepest_d = d;
      deepest = p;
    }
  }

  const bool label = truth.bits[deepest] != 0;
  const int cx = g.x_of(deepest);
  const int cy = g.y_of(deepest);
  Seeds out;
  auto& target = label ? out.fg : out.bg;
  for (int y = std::max(0, cy - step); y <= std::min(g.height - 1, cy + step); ++y) {
    for (int x = std::max(0, cx - step); x <= std::min(g.width - 1, cx + step); ++x) {
      const int dx = x - cx;
      const int dy = y - cy;
      if (dx * dx + dy * dy <= step * step && truth.at(x, y) == label) target.push_back({x, y});
    }
  }
  return out;
}

double user_effort(std::span<const Point> points) {
  if (points.empty()) throw Error("user_effort needs at least one seed point");
  const std::size_t n = points.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> in_tree(n, 0);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_tree[i] && (u == n || best[i] < best[u])) u = i;
    }
    in_tree[u] = 1;
    total += best[u];
    for (std::size_t i = 0; i < n; ++i) {
      if (in_tree[i]) continue;
      const double dx = points[i].x - points[u].x;
      const double dy = points[i].y - points[u].y;
      best[i] = std::min(best[i], std::sqrt(dx * dx + dy * dy));
    }
  }
  return total;
}

}  // namespace spmrf
