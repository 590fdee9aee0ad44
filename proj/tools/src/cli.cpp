#include "spmrf/tools/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "spmrf/fixture.hpp"
#include "spmrf/image_io.hpp"
#include "spmrf/segmentation.hpp"
#include "spmrf/solver.hpp"
#include "spmrf/superpixelizer.hpp"
#include "spmrf/tools/bench.hpp"
#include "spmrf/tools/inputs.hpp"
#include "spmrf/tools/service.hpp"

namespace spmrf::tools {
namespace fs = std::filesystem;

namespace {

struct SuperpixelizeArgs {
  std::string mrf;
  std::string partition;
  std::string out;
};

struct SegmentArgs {
  std::string image;
  std::string edges;
  std::string seeds;
  std::string partition;
  int slic = 0;
  double compactness = 10.0;
  bool pixel_level = false;
  UnaryParams unary;
  std::string out_mask;
  std::string truth;
  std::string report;
};

struct BenchArgs {
  std::string corpus;
  int synthetic = 0;
  int width = 481;
  int height = 321;
  std::uint64_t seed = 0;
  BenchOptions options;
  std::string report;
};

struct SynthArgs {
  std::string out_dir;
  int count = 1;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 0;
  int seed_radius = 3;
};

struct DimacsArgs {
  std::string mrf;
  std::string partition;
  std::string out;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  int superpixels = 800;
  double lambda = 1.0;
};

void print_number(std::ostream& os, const char* key, double v) {
  os << key << ' ' << std::setprecision(17) << v << '\n';
}

int cmd_superpixelize(const SuperpixelizeArgs& a, std::ostream& out) {
  const PixelMrf mrf = parse_pixel_fixture(read_file(a.mrf));
  const auto loaded = load_partition(read_file(a.partition));
  const auto [sp, report] = superpixelize(mrf, loaded.partition);
  write_file(a.out, write_fixture(sp));
  print_number(out, "C", sp.constant);
  out << "K " << sp.node_count << '\n';
  out << "edges " << sp.edges.size() << '\n';
  if (loaded.relabeled) out << "note partition labels were compacted\n";
  return kExitOk;
}

int cmd_dimacs(const DimacsArgs& a, std::ostream& out) {
  const PixelMrf mrf = parse_pixel_fixture(read_file(a.mrf));
  std::string text;
  double offset = 0.0;
  if (a.partition.empty()) {
    const StGraph st = build_st_graph(mrf.view());
    text = to_dimacs(st.graph);
    offset = st.offset;
  } else {
    const auto sp = superpixelize(mrf, load_partition(read_file(a.partition)).partition).mrf;
    const StGraph st = build_st_graph(sp.view());
    text = to_dimacs(st.graph);
    offset = st.offset;
  }
  std::ostringstream header;
  header << "c minimum energy = max flow + " << std::setprecision(17) << offset << '\n';
  if (a.out.empty()) {
    out << header.str() << text;
  } else {
    write_file(a.out, header.str() + text);
  }
  return kExitOk;
}

void append_report(const fs::path& path, const BenchRecord& r) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error("cannot write " + path.string());
  os << std::setprecision(17);
  if (fresh) os << kReportHeader << '\n';
  write_record(os, r);
}

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  CorpusItem item;
  item.name = fs::path(a.image).stem().string();
  item.image = load_rgb_image(read_file(a.image));
  item.edges = a.edges.empty() ? gradient_edge_map(item.image) : load_binary_map(a.edges);
  if (!(item.edges.geometry == item.image.geometry)) throw DimensionError("edge map size differs from the image");
  item.seeds = parse_seeds_json(read_file(a.seeds));
  item.seeds.validate(item.image.geometry);
  if (!a.truth.empty()) {
    item.truth = load_binary_map(a.truth);
    if (!(item.truth->geometry == item.image.geometry)) throw DimensionError("truth size differs from the image");
  }

  std::optional<SuperpixelPartition> partition;
  if (!a.pixel_level || !a.report.empty()) {
    if (!a.partition.empty()) {
      partition = load_partition(read_file(a.partition)).partition;
    } else {
      const int pixels = static_cast<int>(item.image.geometry.pixel_count());
      const int target = a.slic > 0 ? a.slic : 800;
      partition = slic_superpixels(item.image, {std::min(target, pixels), a.compactness, 10});
    }
  }

  const SegmentResult r =
      a.pixel_level ? segment_pixel(item.image, item.edges, item.seeds, a.unary)
                    : segment_superpixel(item.image, item.edges, item.seeds, *partition, a.unary);
  out << "level " << (a.pixel_level ? "pixel" : "superpixel") << '\n';
  out << "K " << r.node_count << '\n';
  print_number(out, "energy", r.solve.energy);
  out << "foreground " << r.mask.count() << '\n';
  print_number(out, "unary_ms", r.timings.unary_ms);
  print_number(out, "aggregation_ms", r.timings.aggregation_ms);
  print_number(out, "solve_ms", r.timings.solve_ms);
  print_number(out, "total_ms", r.timings.total_ms);
  if (item.truth) {
    print_number(out, "overlap", overlap_ratio(r.mask, *item.truth));
    if (mask_boundary(r.mask).count() > 0 && mask_boundary(*item.truth).count() > 0) {
      print_number(out, "boundary_deviation", boundary_deviation(r.mask, *item.truth));
    }
  }
  if (!a.out_mask.empty()) save_mask(a.out_mask, r.mask);
  if (!a.report.empty()) append_report(a.report, bench_one(item, *partition, a.unary));
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<CorpusItem> items = a.corpus.empty()
                                      ? synthetic_corpus(a.synthetic, a.width, a.height, a.seed)
                                      : load_corpus(a.corpus);
  const auto records = run_bench(items, a.options);
  const auto summary = summarize(records);

  std::ofstream file;
  if (!a.report.empty()) {
    file.open(a.report);
    if (!file) throw Error("cannot write " + a.report);
  }
  std::ostream& csv = a.report.empty() ? out : file;
  csv << std::setprecision(17) << kReportHeader << '\n';
  for (const auto& r : records) write_record(csv, r);
  for (const auto& r : summary) write_record(csv, r);

  std::vector<double> sp, px;
  for (const auto& r : records) {
    sp.push_back(r.sp_solve_ms);
    px.push_back(r.px_solve_ms);
  }
  const double ratio = median(px) / median(sp);
  out << (a.report.empty() ? "# " : "") << "images " << items.size() << " repetitions "
      << a.options.repeat << " median_speedup " << std::setprecision(6) << ratio << '\n';
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto items = synthetic_corpus(a.count, a.width, a.height, a.seed, a.seed_radius);
  write_corpus(a.out_dir, items);
  out << "wrote " << items.size() << " items to " << a.out_dir << '\n';
  return kExitOk;
}

int cmd_serve(const ServeArgs& a) {
  ServiceConfig config = ServiceConfig::from_env();
  config.superpixels = a.superpixels;
  config.unary.lambda = a.lambda;
  return serve(config, a.host, a.port);
}

int port_from_env() {
  const char* v = std::getenv("SPMRF_PORT");
  if (!v || !*v) return 8080;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw Error(std::string("SPMRF_PORT is not a number: ") + v);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superpixel-level binary MRF toolkit"};
  app.name("spmrf");
  app.require_subcommand(1);

  SuperpixelizeArgs spa;
  auto* sp_cmd = app.add_subcommand("superpixelize", "Aggregate a pixel MRF fixture over a partition");
  sp_cmd->add_option("--mrf", spa.mrf, "Pixel MRF fixture")->required();
  sp_cmd->add_option("--partition", spa.partition, "Partition (16-bit PGM or CSV)")->required();
  sp_cmd->add_option("--out", spa.out, "Output superpixel fixture")->required();

  SegmentArgs sga;
  auto* seg_cmd = app.add_subcommand("segment", "Seeded two-region segmentation of one image");
  seg_cmd->add_option("--image", sga.image, "PNG, PPM or PGM image")->required();
  seg_cmd->add_option("--edges", sga.edges, "Binary edge map; gradient edges when omitted");
  seg_cmd->add_option("--seeds", sga.seeds, "Seed JSON file")->required();
  auto* part_opt = seg_cmd->add_option("--partition", sga.partition, "Partition file");
  seg_cmd->add_option("--slic", sga.slic, "Generate about N superpixels (default 800)")
      ->excludes(part_opt)
      ->check(CLI::PositiveNumber);
  seg_cmd->add_option("--compactness", sga.compactness, "Superpixel compactness")->capture_default_str();
  seg_cmd->add_flag("--pixel-level", sga.pixel_level, "Solve on pixels instead of superpixels");
  seg_cmd->add_option("--lambda", sga.unary.lambda, "Unary weight")->capture_default_str();
  seg_cmd->add_option("--bins", sga.unary.bins, "Histogram bins per channel")->capture_default_str();
  seg_cmd->add_option("--out-mask", sga.out_mask, "Write the mask (PGM, or PNG by extension)");
  seg_cmd->add_option("--truth", sga.truth, "Ground-truth mask");
  seg_cmd->add_option("--report", sga.report, "Append a CSV row comparing both solvers");

  BenchArgs bna;
  auto* bench_cmd = app.add_subcommand("bench", "Time superpixel and pixel solves over a corpus");
  auto* corpus_opt = bench_cmd->add_option("--corpus", bna.corpus, "Corpus directory");
  auto* synth_opt = bench_cmd->add_option("--synthetic", bna.synthetic, "Generate N synthetic images")
                        ->check(CLI::PositiveNumber);
  corpus_opt->excludes(synth_opt);
  bench_cmd->add_option("--width", bna.width, "Synthetic width")->capture_default_str();
  bench_cmd->add_option("--height", bna.height, "Synthetic height")->capture_default_str();
  bench_cmd->add_option("--seed", bna.seed, "Seed for synthetic scenes")->capture_default_str();
  bench_cmd->add_option("--superpixels", bna.options.superpixels, "Superpixel target")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--compactness", bna.options.compactness, "Superpixel compactness")
      ->capture_default_str();
  bench_cmd->add_option("--repeat", bna.options.repeat, "Timed repetitions per image")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--lambda", bna.options.unary.lambda, "Unary weight")->capture_default_str();
  bench_cmd->add_option("--report", bna.report, "CSV output (stdout when omitted)");

  SynthArgs sya;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with truth masks");
  synth_cmd->add_option("--out-dir", sya.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", sya.count, "Number of images")->capture_default_str();
  synth_cmd->add_option("--width", sya.width, "Width")->capture_default_str();
  synth_cmd->add_option("--height", sya.height, "Height")->capture_default_str();
  synth_cmd->add_option("--seed", sya.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--seed-radius", sya.seed_radius, "Radius of the seed clicks")->capture_default_str();

  DimacsArgs dma;
  auto* dimacs_cmd = app.add_subcommand("dimacs", "Export the s-t graph of a fixture");
  dimacs_cmd->add_option("--mrf", dma.mrf, "Pixel MRF fixture")->required();
  dimacs_cmd->add_option("--partition", dma.partition, "Aggregate over this partition first");
  dimacs_cmd->add_option("--out", dma.out, "Output file (stdout when omitted)");

  ServeArgs sva;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP segmentation service");
  serve_cmd->add_option("--host", sva.host, "Bind address")->capture_default_str();
  auto* port_opt = serve_cmd->add_option("--port", sva.port, "Port (default $SPMRF_PORT or 8080)");
  serve_cmd->add_option("--superpixels", sva.superpixels, "Superpixels per session")->capture_default_str();
  serve_cmd->add_option("--lambda", sva.lambda, "Unary weight")->capture_default_str();

  std::vector<const char*> argv{"spmrf"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*bench_cmd && bna.corpus.empty() && bna.synthetic == 0) {
    err << "bench: one of --corpus or --synthetic is required\n";
    return kExitUsage;
  }

  try {
    if (*sp_cmd) return cmd_superpixelize(spa, out);
    if (*seg_cmd) return cmd_segment(sga, out);
    if (*bench_cmd) return cmd_bench(bna, out);
    if (*synth_cmd) return cmd_synth(sya, out);
    if (*dimacs_cmd) return cmd_dimacs(dma, out);
    if (*serve_cmd) {
      if (port_opt->count() == 0) sva.port = port_from_env();
      return cmd_serve(sva);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitGeometry;
  } catch (const NotSubmodularError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotSubmodular;
  } catch (const SeedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSeeds;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace spmrf::tools
