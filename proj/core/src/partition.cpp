#include "spmrf/partition.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "spmrf/image_io.hpp"

namespace spmrf {
namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

// Connected components of equal-label pixels (4-connectivity).
struct Components {
  std::vector<std::uint32_t> component;  // per pixel
  std::vector<std::uint32_t> label;      // per component
  std::vector<std::uint32_t> size;       // per component
};

Components label_components(const GridGeometry& g, std::span<const std::uint32_t> labels) {
  const std::size_t n = g.pixel_count();
  Components c;
  c.component.assign(n, kUnset);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (c.component[start] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(c.label.size());
    const std::uint32_t lab = labels[start];
    std::uint32_t count = 0;
    c.component[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      ++count;
      const int x = g.x_of(p);
      const int y = g.y_of(p);
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int nx = x + dx[d];
        const int ny = y + dy[d];
        if (!g.contains(nx, ny)) continue;
        const std::uint32_t q = g.index(nx, ny);
        if (c.component[q] == kUnset && labels[q] == lab) {
          c.component[q] = id;
          stack.push_back(q);
        }
      }
    }
    c.label.push_back(lab);
    c.size.push_back(count);
  }
  return c;
}

// Folds every non-largest fragment of a label into the neighboring label
// with the most pixels. Each merge joins two components, so this terminates.
void enforce_connectivity(const GridGeometry& g, std::vector<std::uint32_t>& labels) {
  for (;;) {
    const Components c = label_components(g, labels);
    std::unordered_map<std::uint32_t, std::uint32_t> main_component;
    std::unordered_map<std::uint32_t, std::uint64_t> label_size;
    for (std::uint32_t id = 0; id < c.label.size(); ++id) {
      label_size[c.label[id]] += c.size[id];
      auto [it, inserted] = main_component.try_emplace(c.label[id], id);
      if (!inserted && c.size[id] > c.size[it->second]) it->second = id;
    }
    if (main_component.size() == c.label.size()) return;

    // Best neighboring label per orphan component, preferring main components.
    std::vector<std::uint32_t> best(c.label.size(), kUnset);
    std::vector<std::uint8_t> best_is_main(c.label.size(), 0);
    const std::size_t n = g.pixel_count();
    for (std::uint32_t p = 0; p < n; ++p) {
      const std::uint32_t id = c.component[p];
      if (main_component.at(c.label[id]) == id) continue;
      const int x = g.x_of(p);
      const int y = g.y_of(p);
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        if (!g.contains(x + dx[d], y + dy[d])) continue;
        const std::uint32_t other = c.component[g.index(x + dx[d], y + dy[d])];
        if (other == id) continue;
        const std::uint32_t lab = c.label[other];
        const bool is_main = main_component.at(lab) == other;
        const bool better =
            best[id] == kUnset || (is_main && !best_is_main[id]) ||
            (is_main == static_cast<bool>(best_is_main[id]) &&
             (label_size[lab] > label_size[best[id]] ||
              (label_size[lab] == label_size[best[id]] && lab < best[id])));
        if (better) {
          best[id] = lab;
          best_is_main[id] = is_main ? 1 : 0;
        }
      }
    }
    for (std::uint32_t p = 0; p < n; ++p) {
      const std::uint32_t id = c.component[p];
      if (best[id] != kUnset) labels[p] = best[id];
    }
  }
}

std::uint32_t parse_uint(std::string_view text, const char* what) {
  std::uint32_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

LoadedPartition load_csv(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    const std::string_view line =
        trim(bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (lines.empty()) throw ParseError("empty partition file");
  const std::string_view header = lines.front();
  const std::size_t comma = header.find(',');
  if (comma == std::string_view::npos) throw ParseError("partition header must be 'width,height'");
  const auto width = parse_uint(trim(header.substr(0, comma)), "width");
  const auto height = parse_uint(trim(header.substr(comma + 1)), "height");
  if (width == 0 || height == 0) throw ParseError("partition has no pixels");
  if (static_cast<std::uint64_t>(width) * height > (std::uint64_t{1} << 31)) {
    throw ParseError("partition too large");
  }
  const GridGeometry g(static_cast<int>(width), static_cast<int>(height));
  if (lines.size() - 1 != g.pixel_count()) {
    throw ParseError("partition has " + std::to_string(lines.size() - 1) + " labels for " +
                     std::to_string(g.pixel_count()) + " pixels");
  }
  std::vector<std::uint32_t> labels(g.pixel_count());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = parse_uint(lines[i + 1], "label");
  LoadedPartition out{SuperpixelPartition::compacted(g, labels), false};
  out.relabeled = !std::equal(labels.begin(), labels.end(), out.partition.labels().begin());
  return out;
}

}  // namespace

SuperpixelPartition::SuperpixelPartition(GridGeometry geometry, std::vector<std::uint32_t> labels)
    : geometry_(geometry), labels_(std::move(labels)) {
  if (labels_.size() != geometry_.pixel_count()) {
    throw DimensionError("partition has " + std::to_string(labels_.size()) + " labels for " +
                         std::to_string(geometry_.pixel_count()) + " pixels");
  }
  const std::uint32_t max_label = *std::max_element(labels_.begin(), labels_.end());
  if (max_label >= labels_.size()) throw DimensionError("partition labels are not dense in [0, K)");
  std::vector<std::uint8_t> used(static_cast<std::size_t>(max_label) + 1, 0);
  for (auto l : labels_) used[l] = 1;
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw DimensionError("partition labels are not dense in [0, K)");
  }
  count_ = max_label + 1;
}

SuperpixelPartition SuperpixelPartition::compacted(GridGeometry geometry,
                                                   std::span<const std::uint32_t> labels) {
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::vector<std::uint32_t> dense(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], static_cast<std::uint32_t>(remap.size()));
    dense[i] = it->second;
  }
  return SuperpixelPartition(geometry, std::move(dense));
}

std::vector<std::uint32_t> SuperpixelPartition::sizes() const {
  std::vector<std::uint32_t> s(count_, 0);
  for (auto l : labels_) ++s[l];
  return s;
}

RgbImage::RgbImage(GridGeometry g) : geometry(g) {
  for (auto& c : channels) c.assign(g.pixel_count(), 0.0f);
}

SuperpixelPartition identity_partition(const GridGeometry& geometry) {
  std::vector<std::uint32_t> labels(geometry.pixel_count());
  for (std::uint32_t p = 0; p < labels.size(); ++p) labels[p] = p;
  return SuperpixelPartition(geometry, std::move(labels));
}

SuperpixelPartition slic_superpixels(const RgbImage& image, const SlicParams& params) {
  const GridGeometry& g = image.geometry;
  const std::size_t n = g.pixel_count();
  if (params.target_count < 1 || static_cast<std::size_t>(params.target_count) > n) {
    throw DimensionError("superpixel target " + std::to_string(params.target_count) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  if (!(params.compactness > 0.0) || params.iterations < 1) {
    throw DimensionError("compactness and iterations must be positive");
  }
  const int w = g.width;
  const int h = g.height;
  const double target = params.target_count;

  const int cols = std::clamp(static_cast<int>(std::lround(std::sqrt(target * w / h))), 1,
                              std::min(w, params.target_count));
  const int rows = std::clamp(static_cast<int>(std::lround(target / cols)), 1, h);
  const double step_x = static_cast<double>(w) / cols;
  const double step_y = static_cast<double>(h) / rows;
  const double step = std::sqrt(step_x * step_y);
  // Channels live in [0, 1]; compactness is calibrated for a [0, 100] color
  // range, hence the 1/100.
  const double spatial_weight = (params.compactness / 100.0) / step;
  const double spatial_weight_sq = spatial_weight * spatial_weight;

  struct Center {
    double r, g, b, x, y;
  };
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(cols) * rows);
  std::vector<std::uint32_t> labels(n);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const double cx = (i + 0.5) * step_x - 0.5;
      const double cy = (j + 0.5) * step_y - 0.5;
      const std::uint32_t p = g.index(std::clamp(static_cast<int>(std::lround(cx)), 0, w - 1),
                                      std::clamp(static_cast<int>(std::lround(cy)), 0, h - 1));
      centers.push_back({image.channels[0][p], image.channels[1][p], image.channels[2][p], cx, cy});
    }
  }
  for (int y = 0; y < h; ++y) {
    const int j = std::min(rows - 1, static_cast<int>(y / step_y));
    for (int x = 0; x < w; ++x) {
      const int i = std::min(cols - 1, static_cast<int>(x / step_x));
      labels[g.index(x, y)] = static_cast<std::uint32_t>(j * cols + i);
    }
  }

  std::vector<double> distance(n);
  struct Accumulator {
    double r = 0, g = 0, b = 0, x = 0, y = 0;
    std::uint32_t count = 0;
  };
  std::vector<Accumulator> acc(centers.size());
  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
    for (std::uint32_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x - step_x)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + step_x)));
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y - step_y)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + step_y)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const std::uint32_t p = g.index(x, y);
          const double dr = image.channels[0][p] - c.r;
          const double dg = image.channels[1][p] - c.g;
          const double db = image.channels[2][p] - c.b;
          const double dx = x - c.x;
          const double dy = y - c.y;
          const double d = dr * dr + dg * dg + db * db + (dx * dx + dy * dy) * spatial_weight_sq;
          if (d < distance[p]) {
            distance[p] = d;
            labels[p] = k;
          }
        }
      }
    }
    std::fill(acc.begin(), acc.end(), Accumulator{});
    for (std::uint32_t p = 0; p < n; ++p) {
      Accumulator& a = acc[labels[p]];
      a.r += image.channels[0][p];
      a.g += image.channels[1][p];
      a.b += image.channels[2][p];
      a.x += g.x_of(p);
      a.y += g.y_of(p);
      ++a.count;
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Accumulator& a = acc[k];
      if (a.count == 0) continue;
      const double inv = 1.0 / a.count;
      centers[k] = {a.r * inv, a.g * inv, a.b * inv, a.x * inv, a.y * inv};
    }
  }

  enforce_connectivity(g, labels);
  return SuperpixelPartition::compacted(g, labels);
}

LoadedPartition load_partition(std::string_view bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    const Raster r = read_netpbm(bytes);
    std::vector<std::uint32_t> labels(r.samples.begin(), r.samples.end());
    LoadedPartition out{SuperpixelPartition::compacted(r.geometry, labels), false};
    out.relabeled = !std::equal(labels.begin(), labels.end(), out.partition.labels().begin());
    return out;
  }
  return load_csv(bytes);
}

std::string save_partition(const SuperpixelPartition& partition, PartitionFormat format) {
  const GridGeometry& g = partition.geometry();
  if (format == PartitionFormat::kPgm16) {
    if (partition.count() > 65536) throw DimensionError("16-bit PGM holds at most 65536 superpixels");
    std::vector<std::uint16_t> values(partition.labels().begin(), partition.labels().end());
    return encode_pgm16(g, values);
  }
  std::string out = std::to_string(g.width) + "," + std::to_string(g.height) + "\n";
  for (auto l : partition.labels()) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

std::vector<SuperpixelAdjacency> adjacency(const SuperpixelPartition& partition,
                                           std::span<const NeighborPair> pairs) {
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  const std::size_t n = partition.geometry().pixel_count();
  for (const auto& np : pairs) {
    if (np.p >= n || np.q >= n) throw DimensionError("pair index outside partition geometry");
    std::uint32_t k = partition.label(np.p);
    std::uint32_t l = partition.label(np.q);
    if (k == l) continue;
    if (k > l) std::swap(k, l);
    ++counts[(static_cast<std::uint64_t>(k) << 32) | l];
  }
  std::vector<SuperpixelAdjacency> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    out.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key), count});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return std::tie(a.k, a.l) < std::tie(b.k, b.l); });
  return out;
}

bool is_connected(const SuperpixelPartition& partition) {
  return label_components(partition.geometry(), partition.labels()).label.size() ==
         partition.count();
}

}  // namespace spmrf
