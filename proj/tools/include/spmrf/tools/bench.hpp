#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spmrf/partition.hpp"
#include "spmrf/segmentation.hpp"

namespace spmrf::tools {

/// One (image, edges, seeds, truth) tuple.
struct CorpusItem {
  std::string name;
  RgbImage image;
  EdgeMap edges;
  Seeds seeds;
  std::optional<Mask> truth;
};

/// Files per item in `dir`: <name>.seeds.json plus an image named
/// <name>.png, <name>.ppm or <name>.pgm; optional <name>.edges.pgm (gradient
/// edges otherwise) and <name>.truth.pgm.
[[nodiscard]] std::vector<CorpusItem> load_corpus(const std::filesystem::path& dir);

/// Two-region scenes with exact truth and boundary edges; seeds are one fg
/// and one bg robot click of radius `seed_radius`.
[[nodiscard]] std::vector<CorpusItem> synthetic_corpus(int count, int width, int height,
                                                       std::uint64_t seed, int seed_radius = 3);

void write_corpus(const std::filesystem::path& dir, const std::vector<CorpusItem>& items);

struct BenchRecord {
  std::string image;
  double k = 0.0;
  double agg_ms = 0.0;
  double sp_solve_ms = 0.0;
  double px_solve_ms = 0.0;
  double sp_energy = 0.0;
  double px_energy = 0.0;
  double overlap_sp = 0.0;
  double overlap_px = 0.0;
};

struct BenchOptions {
  int superpixels = 800;
  double compactness = 10.0;
  int repeat = 1;
  UnaryParams unary;
};

/// One record per (item, repetition). Superpixel generation is done once
/// per item and never timed; aggregation and solve are timed separately.
/// Overlaps are NaN when an item has no truth.
[[nodiscard]] std::vector<BenchRecord> run_bench(const std::vector<CorpusItem>& items,
                                                 const BenchOptions& options);

/// Record for a single segmentation under both solvers.
[[nodiscard]] BenchRecord bench_one(const CorpusItem& item, const SuperpixelPartition& partition,
                                    const UnaryParams& unary);

inline const char* const kReportHeader =
    "image,K,agg_ms,sp_solve_ms,px_solve_ms,sp_energy,px_energy,overlap_sp,overlap_px";

void write_record(std::ostream& os, const BenchRecord& r);

/// Rows named summary:mean, summary:std, summary:min, summary:median,
/// summary:max over every numeric column.
[[nodiscard]] std::vector<BenchRecord> summarize(const std::vector<BenchRecord>& records);

[[nodiscard]] double median(std::vector<double> values);

}  // namespace spmrf::tools
