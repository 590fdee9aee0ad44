#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "spmrf/mrf.hpp"
#include "spmrf/superpixelizer.hpp"

namespace spmrf {

// Line-oriented text format shared by pixel and superpixel MRFs:
//
//   mrf <width> <height> <constant>      or   spmrf <K> <constant>
//   u <node> <unary>
//   e <first> <second> <w00> <w01> <w10> <w11>
//
// Blank lines and lines starting with '#' are ignored. Numbers are written
// in shortest round-trip form, so write(parse(s)) reproduces s exactly for
// files this module wrote. Nodes missing a `u` line get unary 0.

[[nodiscard]] std::string write_fixture(const PixelMrf& mrf);
[[nodiscard]] std::string write_fixture(const SuperpixelMrf& mrf);

[[nodiscard]] PixelMrf parse_pixel_fixture(std::string_view text);
[[nodiscard]] SuperpixelMrf parse_superpixel_fixture(std::string_view text);

using AnyMrf = std::variant<PixelMrf, SuperpixelMrf>;
/// Dispatches on the header keyword.
[[nodiscard]] AnyMrf parse_fixture(std::string_view text);

/// Body lines only (everything after the header line).
[[nodiscard]] std::string_view fixture_body(std::string_view text);

}  // namespace spmrf
