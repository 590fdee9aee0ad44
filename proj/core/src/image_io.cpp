#include "spmrf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace spmrf {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      out.push_back(bytes_[pos_++]);
    }
    if (out.empty()) throw ParseError("truncated netpbm header");
    return out;
  }

  int integer() {
    const std::string t = token();
    int v = 0;
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ParseError("bad netpbm header field '" + t + "'");
      }
      v = v * 10 + (c - '0');
      if (v > 1 << 24) throw ParseError("netpbm header value too large");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size()) throw ParseError("missing netpbm raster");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct PngImageGuard {
  png_image image{};
  PngImageGuard() {
    image.version = PNG_IMAGE_VERSION;
    image.opaque = nullptr;
  }
  ~PngImageGuard() { png_image_free(&image); }
  PngImageGuard(const PngImageGuard&) = delete;
  PngImageGuard& operator=(const PngImageGuard&) = delete;
};

bool has_png_signature(std::string_view bytes) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 8) return false;
  for (int i = 0; i < 8; ++i) {
    if (static_cast<unsigned char>(bytes[i]) != kSig[i]) return false;
  }
  return true;
}

std::string netpbm_header(const char* magic, const GridGeometry& g, int maxval) {
  std::ostringstream os;
  os << magic << '\n' << g.width << ' ' << g.height << '\n' << maxval << '\n';
  return os.str();
}

}  // namespace

Raster read_netpbm(std::string_view bytes) {
  HeaderReader reader(bytes);
  const std::string magic = reader.token();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw ParseError("unsupported netpbm magic '" + magic + "'");
  }
  const int width = reader.integer();
  const int height = reader.integer();
  const int maxval = reader.integer();
  if (width < 1 || height < 1) throw ParseError("netpbm image has no pixels");
  if (maxval < 1 || maxval > 65535) throw ParseError("netpbm maxval out of range");

  Raster r;
  r.geometry = GridGeometry(width, height);
  r.channels = channels;
  r.maxval = maxval;
  const std::size_t count = r.geometry.pixel_count() * static_cast<std::size_t>(channels);
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t offset = reader.raster_offset();
  if (bytes.size() < offset + count * bytes_per_sample) throw ParseError("truncated netpbm raster");
  r.samples.resize(count);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < count; ++i) {
    r.samples[i] = bytes_per_sample == 2
                       ? static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1])
                       : data[i];
    if (r.samples[i] > maxval) throw ParseError("netpbm sample exceeds maxval");
  }
  return r;
}

Raster decode_png(std::string_view bytes) {
  PngImageGuard guard;
  if (!png_image_begin_read_from_memory(&guard.image, bytes.data(), bytes.size())) {
    throw ParseError(std::string("png decode failed: ") + guard.image.message);
  }
  const bool color = (guard.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  guard.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (guard.image.width < 1 || guard.image.height < 1) throw ParseError("png has no pixels");

  Raster r;
  r.geometry = GridGeometry(static_cast<int>(guard.image.width), static_cast<int>(guard.image.height));
  r.channels = color ? 3 : 1;
  r.maxval = 255;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(guard.image));
  if (!png_image_finish_read(&guard.image, nullptr, buffer.data(), 0, nullptr)) {
    throw ParseError(std::string("png decode failed: ") + guard.image.message);
  }
  r.samples.assign(buffer.begin(), buffer.end());
  return r;
}

Raster decode_raster(std::string_view bytes) {
  return has_png_signature(bytes) ? decode_png(bytes) : read_netpbm(bytes);
}

std::string encode_pgm8(const GridGeometry& g, std::span<const std::uint8_t> values) {
  if (values.size() != g.pixel_count()) throw DimensionError("pgm value count mismatch");
  std::string out = netpbm_header("P5", g, 255);
  out.append(reinterpret_cast<const char*>(values.data()), values.size());
  return out;
}

std::string encode_pgm16(const GridGeometry& g, std::span<const std::uint16_t> values) {
  if (values.size() != g.pixel_count()) throw DimensionError("pgm value count mismatch");
  std::string out = netpbm_header("P5", g, 65535);
  out.reserve(out.size() + 2 * values.size());
  for (std::uint16_t v : values) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string encode_ppm8(const RgbImage& image) {
  std::string out = netpbm_header("P6", image.geometry, 255);
  const std::size_t n = image.geometry.pixel_count();
  out.reserve(out.size() + 3 * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      const float v = std::clamp(image.channels[c][p], 0.0f, 1.0f);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
    }
  }
  return out;
}

std::string encode_png_gray8(const GridGeometry& g, std::span<const std::uint8_t> values) {
  if (values.size() != g.pixel_count()) throw DimensionError("png value count mismatch");
  PngImageGuard guard;
  guard.image.width = static_cast<png_uint_32>(g.width);
  guard.image.height = static_cast<png_uint_32>(g.height);
  guard.image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&guard.image, nullptr, &size, 0, values.data(), 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + guard.image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&guard.image, out.data(), &size, 0, values.data(), 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + guard.image.message);
  }
  out.resize(size);
  return out;
}

RgbImage to_rgb_image(const Raster& raster) {
  RgbImage image(raster.geometry);
  const std::size_t n = raster.geometry.pixel_count();
  const float scale = 1.0f / static_cast<float>(raster.maxval);
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      const int src = raster.channels == 3 ? c : 0;
      image.channels[c][p] = raster.samples[p * raster.channels + src] * scale;
    }
  }
  return image;
}

RgbImage load_rgb_image(std::string_view bytes) { return to_rgb_image(decode_raster(bytes)); }

std::vector<std::uint8_t> raster_to_bits(const Raster& raster) {
  const std::size_t n = raster.geometry.pixel_count();
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = 0; c < raster.channels; ++c) {
      if (raster.samples[p * raster.channels + c] != 0) bits[p] = 1;
    }
  }
  return bits;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace spmrf
