#include "spmrf/tools/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spmrf/image_io.hpp"
#include "spmrf/synthetic.hpp"
#include "spmrf/tools/inputs.hpp"

namespace spmrf::tools {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSeedsSuffix = ".seeds.json";

std::vector<std::uint8_t> to_gray(const BinaryMap& m) {
  std::vector<std::uint8_t> v(m.bits.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = m.bits[p] ? 255 : 0;
  return v;
}

}  // namespace

std::vector<CorpusItem> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    if (file.size() > kSeedsSuffix.size() && file.ends_with(kSeedsSuffix)) {
      names.push_back(file.substr(0, file.size() - kSeedsSuffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<CorpusItem> items;
  for (const auto& name : names) {
    CorpusItem item;
    item.name = name;
    fs::path image_path;
    for (const char* ext : {".png", ".ppm", ".pgm"}) {
      if (fs::exists(dir / (name + ext))) {
        image_path = dir / (name + ext);
        break;
      }
    }
    if (image_path.empty()) throw Error("corpus item '" + name + "' has no image");
    item.image = load_rgb_image(read_file(image_path));
    item.seeds = parse_seeds_json(read_file(dir / (name + std::string(kSeedsSuffix))));
    const fs::path edges = dir / (name + ".edges.pgm");
    item.edges = fs::exists(edges) ? load_binary_map(edges) : gradient_edge_map(item.image);
    const fs::path truth = dir / (name + ".truth.pgm");
    if (fs::exists(truth)) item.truth = load_binary_map(truth);
    items.push_back(std::move(item));
  }
  if (items.empty()) throw Error("corpus is empty: " + dir.string());
  return items;
}

std::vector<CorpusItem> synthetic_corpus(int count, int width, int height, std::uint64_t seed,
                                         int seed_radius) {
  if (count < 1) throw Error("synthetic corpus needs at least one image");
  std::vector<CorpusItem> items;
  for (int i = 0; i < count; ++i) {
    const auto scene = make_two_region_scene(random_scene_params(width, height, seed + i));
    const GridGeometry& g = scene.image.geometry;
    CorpusItem item;
    item.name = "synthetic_" + std::to_string(i);
    item.image = scene.image;
    item.edges = scene.edges;
    item.truth = scene.truth;
    if (auto fg = robot_user(Mask(g), scene.truth, seed_radius)) item.seeds.merge(*fg);
    if (auto bg = robot_user(Mask(g, 1), scene.truth, seed_radius)) item.seeds.merge(*bg);
    items.push_back(std::move(item));
  }
  return items;
}

void write_corpus(const fs::path& dir, const std::vector<CorpusItem>& items) {
  fs::create_directories(dir);
  for (const auto& item : items) {
    write_file(dir / (item.name + ".ppm"), encode_ppm8(item.image));
    write_file(dir / (item.name + ".edges.pgm"), encode_pgm8(item.edges.geometry, to_gray(item.edges)));
    write_file(dir / (item.name + std::string(kSeedsSuffix)), seeds_to_json(item.seeds) + "\n");
    if (item.truth) {
      write_file(dir / (item.name + ".truth.pgm"), encode_pgm8(item.truth->geometry, to_gray(*item.truth)));
    }
  }
}

BenchRecord bench_one(const CorpusItem& item, const SuperpixelPartition& partition,
                      const UnaryParams& unary) {
  const auto sp = segment_superpixel(item.image, item.edges, item.seeds, partition, unary);
  const auto px = segment_pixel(item.image, item.edges, item.seeds, unary);
  BenchRecord r;
  r.image = item.name;
  r.k = sp.node_count;
  r.agg_ms = sp.timings.aggregation_ms;
  r.sp_solve_ms = sp.timings.solve_ms;
  r.px_solve_ms = px.timings.solve_ms;
  r.sp_energy = sp.solve.energy;
  r.px_energy = px.solve.energy;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.overlap_sp = item.truth ? overlap_ratio(sp.mask, *item.truth) : nan;
  r.overlap_px = item.truth ? overlap_ratio(px.mask, *item.truth) : nan;
  return r;
}

std::vector<BenchRecord> run_bench(const std::vector<CorpusItem>& items, const BenchOptions& options) {
  if (items.empty()) throw Error("corpus is empty");
  if (options.repeat < 1) throw Error("--repeat must be at least 1");
  std::vector<BenchRecord> out;
  for (const auto& item : items) {
    const auto partition =
        slic_superpixels(item.image, {std::min<int>(options.superpixels,
                                                    static_cast<int>(item.image.geometry.pixel_count())),
                                      options.compactness, 10});
    for (int rep = 0; rep < options.repeat; ++rep) out.push_back(bench_one(item, partition, options.unary));
  }
  return out;
}

void write_record(std::ostream& os, const BenchRecord& r) {
  const auto num = [&os](double v) {
    os << ',';
    if (!std::isnan(v)) os << v;
  };
  os << r.image;
  num(r.k);
  num(r.agg_ms);
  num(r.sp_solve_ms);
  num(r.px_solve_ms);
  num(r.sp_energy);
  num(r.px_energy);
  num(r.overlap_sp);
  num(r.overlap_px);
  os << '\n';
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<BenchRecord> summarize(const std::vector<BenchRecord>& records) {
  using Field = double BenchRecord::*;
  const Field fields[] = {&BenchRecord::k,         &BenchRecord::agg_ms,     &BenchRecord::sp_solve_ms,
                          &BenchRecord::px_solve_ms, &BenchRecord::sp_energy, &BenchRecord::px_energy,
                          &BenchRecord::overlap_sp,  &BenchRecord::overlap_px};
  std::vector<BenchRecord> rows(5);
  const char* names[] = {"summary:mean", "summary:std", "summary:min", "summary:median", "summary:max"};
  for (int i = 0; i < 5; ++i) rows[i].image = names[i];
  for (const Field f : fields) {
    std::vector<double> v;
    for (const auto& r : records) {
      if (!std::isnan(r.*f)) v.push_back(r.*f);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (v.empty()) {
      for (auto& row : rows) row.*f = nan;
      continue;
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    rows[0].*f = mean;
    rows[1].*f = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    rows[2].*f = *std::min_element(v.begin(), v.end());
    rows[3].*f = median(v);
    rows[4].*f = *std::max_element(v.begin(), v.end());
  }
  return rows;
}

}  // namespace spmrf::tools
