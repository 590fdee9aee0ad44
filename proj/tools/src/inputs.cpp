#include "spmrf/tools/inputs.hpp"

#include <json.hpp>

#include "spmrf/image_io.hpp"

namespace spmrf::tools {
namespace {

using nlohmann::json;

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer()) throw ParseError(std::string(what) + ": expected an integer");
  return v.get<int>();
}

std::vector<Point> parse_points(const json& arr, const char* what) {
  if (!arr.is_array()) throw ParseError(std::string(what) + ": expected an array of [x,y]");
  std::vector<Point> pts;
  pts.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2) {
      throw ParseError(std::string(what) + ": every point must be [x,y]");
    }
    pts.push_back({as_int(item[0], what), as_int(item[1], what)});
  }
  return pts;
}

}  // namespace

Seeds parse_seeds_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("seeds: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("seeds: top level must be an object");
  Seeds seeds;
  for (const auto& [key, value] : doc.items()) {
    if (key == "fg") {
      seeds.fg = parse_points(value, "fg");
    } else if (key == "bg") {
      seeds.bg = parse_points(value, "bg");
    } else if (key == "box") {
      if (value.is_null()) continue;
      if (!value.is_array() || value.size() != 4) throw ParseError("box: expected [x0,y0,x1,y1]");
      seeds.box = PixelRect{as_int(value[0], "box"), as_int(value[1], "box"), as_int(value[2], "box"),
                            as_int(value[3], "box")};
    } else {
      throw ParseError("seeds: unknown key '" + key + "'");
    }
  }
  return seeds;
}

std::string seeds_to_json(const Seeds& seeds) {
  json doc;
  const auto pts = [](const std::vector<Point>& v) {
    json arr = json::array();
    for (const auto& p : v) arr.push_back({p.x, p.y});
    return arr;
  };
  doc["fg"] = pts(seeds.fg);
  doc["bg"] = pts(seeds.bg);
  if (seeds.box) doc["box"] = {seeds.box->x0, seeds.box->y0, seeds.box->x1, seeds.box->y1};
  return doc.dump();
}

BinaryMap load_binary_map(const std::filesystem::path& path) {
  const Raster r = decode_raster(read_file(path));
  return BinaryMap(r.geometry, raster_to_bits(r));
}

void save_mask(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> v(mask.bits.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = mask.bits[p] ? 255 : 0;
  const bool png = path.extension() == ".png" || path.extension() == ".PNG";
  write_file(path, png ? encode_png_gray8(mask.geometry, v) : encode_pgm8(mask.geometry, v));
}

std::string mask_png(const Mask& mask) {
  std::vector<std::uint8_t> v(mask.bits.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = mask.bits[p] ? 255 : 0;
  return encode_png_gray8(mask.geometry, v);
}

Mask superpixel_boundaries(const SuperpixelPartition& partition) {
  const GridGeometry& g = partition.geometry();
  Mask out(g);
  for (const auto& np : grid_pairs(g)) {
    if (partition.label(np.p) != partition.label(np.q)) out.bits[np.p] = 1;
  }
  return out;
}

}  // namespace spmrf::tools
