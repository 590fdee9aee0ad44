#include "spmrf/fixture.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <vector>

namespace spmrf {
namespace {

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void append_number(std::string& out, std::uint64_t v) {
  std::array<char, 24> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void append_body(std::string& out, std::span<const double> unary,
                 std::span<const PairwiseTerm> terms) {
  for (std::size_t i = 0; i < unary.size(); ++i) {
    out += "u ";
    append_number(out, static_cast<std::uint64_t>(i));
    out += ' ';
    append_number(out, unary[i]);
    out += '\n';
  }
  for (const auto& t : terms) {
    out += "e ";
    append_number(out, static_cast<std::uint64_t>(t.first));
    out += ' ';
    append_number(out, static_cast<std::uint64_t>(t.second));
    for (double w : {t.weights.w00, t.weights.w01, t.weights.w10, t.weights.w11}) {
      out += ' ';
      append_number(out, w);
    }
    out += '\n';
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class LineParser {
 public:
  explicit LineParser(std::string_view text) : text_(text) {}

  // Next non-blank, non-comment line split into tokens; false at end.
  bool next(std::vector<std::string_view>& tokens) {
    while (pos_ < text_.size()) {
      const std::size_t nl = text_.find('\n', pos_);
      const std::string_view line =
          text_.substr(pos_, nl == std::string_view::npos ? std::string_view::npos : nl - pos_);
      pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
      ++line_no_;
      tokens = split_ws(line);
      if (!tokens.empty() && tokens.front().front() != '#') return true;
    }
    return false;
  }

  [[nodiscard]] ParseError error(const std::string& what) const {
    return ParseError("fixture line " + std::to_string(line_no_) + ": " + what);
  }

  double real(std::string_view t) const {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw error("bad number '" + std::string(t) + "'");
    }
    return v;
  }

  std::uint64_t integer(std::string_view t) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      throw error("bad integer '" + std::string(t) + "'");
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

// Reads u/e lines after the header into the given arrays.
void parse_body(LineParser& lp, std::size_t node_count, std::vector<double>& unary,
                std::vector<PairwiseTerm>& terms, bool canonical_pairs) {
  unary.assign(node_count, 0.0);
  std::vector<std::uint8_t> seen_unary(node_count, 0);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen_pairs;
  std::vector<std::string_view> tok;
  while (lp.next(tok)) {
    if (tok[0] == "u") {
      if (tok.size() != 3) throw lp.error("expected 'u <node> <value>'");
      const auto i = lp.integer(tok[1]);
      if (i >= node_count) throw lp.error("node index out of range");
      if (seen_unary[i]) throw lp.error("duplicate unary");
      seen_unary[i] = 1;
      unary[i] = lp.real(tok[2]);
    } else if (tok[0] == "e") {
      if (tok.size() != 7) throw lp.error("expected 'e <a> <b> <w00> <w01> <w10> <w11>'");
      const auto a = lp.integer(tok[1]);
      const auto b = lp.integer(tok[2]);
      if (a >= node_count || b >= node_count) throw lp.error("edge index out of range");
      if (canonical_pairs && a >= b) throw lp.error("edge must satisfy first < second");
      if (a == b) throw lp.error("self edge");
      if (!seen_pairs.emplace(std::min(a, b), std::max(a, b)).second) {
        throw lp.error("duplicate edge");
      }
      terms.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                       {lp.real(tok[3]), lp.real(tok[4]), lp.real(tok[5]), lp.real(tok[6])}});
    } else {
      throw lp.error("unknown record '" + std::string(tok[0]) + "'");
    }
  }
}

}  // namespace

std::string write_fixture(const PixelMrf& mrf) {
  std::string out = "mrf ";
  append_number(out, static_cast<std::uint64_t>(mrf.geometry.width));
  out += ' ';
  append_number(out, static_cast<std::uint64_t>(mrf.geometry.height));
  out += ' ';
  append_number(out, mrf.constant);
  out += '\n';
  append_body(out, mrf.unary, mrf.pairs);
  return out;
}

std::string write_fixture(const SuperpixelMrf& mrf) {
  std::string out = "spmrf ";
  append_number(out, static_cast<std::uint64_t>(mrf.node_count));
  out += ' ';
  append_number(out, mrf.constant);
  out += '\n';
  append_body(out, mrf.unary, mrf.edges);
  return out;
}

PixelMrf parse_pixel_fixture(std::string_view text) {
  LineParser lp(text);
  std::vector<std::string_view> tok;
  if (!lp.next(tok)) throw ParseError("empty fixture");
  if (tok[0] != "mrf" || tok.size() != 4) throw lp.error("expected 'mrf <width> <height> <constant>'");
  const auto w = lp.integer(tok[1]);
  const auto h = lp.integer(tok[2]);
  if (w == 0 || h == 0 || w * h > (std::uint64_t{1} << 31)) throw lp.error("bad grid size");
  PixelMrf mrf;
  mrf.geometry = GridGeometry(static_cast<int>(w), static_cast<int>(h));
  mrf.constant = lp.real(tok[3]);
  parse_body(lp, mrf.geometry.pixel_count(), mrf.unary, mrf.pairs, true);
  return mrf;
}

SuperpixelMrf parse_superpixel_fixture(std::string_view text) {
  LineParser lp(text);
  std::vector<std::string_view> tok;
  if (!lp.next(tok)) throw ParseError("empty fixture");
  if (tok[0] != "spmrf" || tok.size() != 3) throw lp.error("expected 'spmrf <K> <constant>'");
  const auto k = lp.integer(tok[1]);
  if (k == 0 || k > (std::uint64_t{1} << 31)) throw lp.error("bad node count");
  SuperpixelMrf mrf;
  mrf.node_count = static_cast<std::uint32_t>(k);
  mrf.constant = lp.real(tok[2]);
  parse_body(lp, k, mrf.unary, mrf.edges, true);
  return mrf;
}

AnyMrf parse_fixture(std::string_view text) {
  LineParser lp(text);
  std::vector<std::string_view> tok;
  if (!lp.next(tok)) throw ParseError("empty fixture");
  if (tok[0] == "mrf") return parse_pixel_fixture(text);
  if (tok[0] == "spmrf") return parse_superpixel_fixture(text);
  throw ParseError("unknown fixture header '" + std::string(tok[0]) + "'");
}

std::string_view fixture_body(std::string_view text) {
  const std::size_t nl = text.find('\n');
  return nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
}

}  // namespace spmrf
