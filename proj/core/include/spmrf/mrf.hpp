#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spmrf {

/// Base class for every error raised by the library. Subclasses let callers
/// (the CLI in particular) map failures to distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs disagree on size or geometry.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A pairwise term violates w00 + w11 <= w01 + w10.
class NotSubmodularError : public Error {
 public:
  using Error::Error;
};

/// Absolute slack used for every submodularity comparison.
inline constexpr double kSubmodularTolerance = 1e-12;

struct GridGeometry {
  int width = 1;
  int height = 1;

  GridGeometry() = default;
  GridGeometry(int w, int h);

  [[nodiscard]] std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  [[nodiscard]] std::uint32_t index(int x, int y) const {
    return static_cast<std::uint32_t>(y) * static_cast<std::uint32_t>(width) +
           static_cast<std::uint32_t>(x);
  }
  [[nodiscard]] int x_of(std::uint32_t p) const { return static_cast<int>(p % width); }
  [[nodiscard]] int y_of(std::uint32_t p) const { return static_cast<int>(p / width); }
  [[nodiscard]] bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Unordered neighbor pair stored with p < q.
struct NeighborPair {
  std::uint32_t p = 0;
  std::uint32_t q = 0;

  friend bool operator==(const NeighborPair&, const NeighborPair&) = default;
  friend auto operator<=>(const NeighborPair&, const NeighborPair&) = default;
};

/// Energy table of a pairwise term. w01 is the energy of (first = 0,
/// second = 1) in the canonical orientation of the owning pair.
struct PairwiseWeights {
  double w00 = 0.0;
  double w01 = 0.0;
  double w10 = 0.0;
  double w11 = 0.0;

  [[nodiscard]] double at(int first, int second) const {
    if (first == 0) return second == 0 ? w00 : w01;
    return second == 0 ? w10 : w11;
  }
  /// Same table seen from the other endpoint.
  [[nodiscard]] PairwiseWeights swapped() const { return {w00, w10, w01, w11}; }
  /// w01 + w10 - w00 - w11; non-negative for a submodular term.
  [[nodiscard]] double regularity_margin() const { return w01 + w10 - w00 - w11; }

  PairwiseWeights& operator+=(const PairwiseWeights& o) {
    w00 += o.w00;
    w01 += o.w01;
    w10 += o.w10;
    w11 += o.w11;
    return *this;
  }

  friend bool operator==(const PairwiseWeights&, const PairwiseWeights&) = default;
};

/// A pairwise term between two nodes of a generic MRF (pixels or superpixels).
struct PairwiseTerm {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  PairwiseWeights weights;

  friend bool operator==(const PairwiseTerm&, const PairwiseTerm&) = default;
};

/// Binary assignment, one bit per node.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::size_t n, std::uint8_t value = 0) : bits_(n, value ? 1 : 0) {}
  explicit Labeling(std::vector<std::uint8_t> bits);
  Labeling(std::initializer_list<std::uint8_t> bits) : Labeling(std::vector<std::uint8_t>(bits)) {}

  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  [[nodiscard]] std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const { return bits_; }
  [[nodiscard]] Labeling complemented() const;

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Non-owning view of a binary pairwise energy
///   constant + sum_i unary_i x_i + sum_terms V(x_first, x_second).
/// Both pixel- and superpixel-level models evaluate and solve through it.
struct MrfView {
  std::span<const double> unary;
  std::span<const PairwiseTerm> terms;
  double constant = 0.0;

  [[nodiscard]] std::size_t node_count() const { return unary.size(); }
};

/// Pixel-level binary MRF over a grid. unary[p] = w^1_p - w^0_p; the dropped
/// sum of w^0_p (and any other constant) lives in `constant`.
struct PixelMrf {
  GridGeometry geometry;
  std::vector<double> unary;
  std::vector<PairwiseTerm> pairs;
  double constant = 0.0;

  [[nodiscard]] MrfView view() const { return {unary, pairs, constant}; }
  /// Checks lengths, index ranges, p < q and pair uniqueness.
  void validate() const;
};

using PairWeightFn = std::function<PairwiseWeights(const NeighborPair&)>;

/// All horizontal and vertical 4-adjacencies, each once with p < q, in
/// raster order of p (right neighbor before the one below).
[[nodiscard]] std::vector<NeighborPair> grid_pairs(const GridGeometry& geometry);

[[nodiscard]] PixelMrf build_grid_mrf(const GridGeometry& geometry, std::vector<double> unary,
                                      const PairWeightFn& pair_weight_fn, double constant = 0.0);

[[nodiscard]] double energy(const MrfView& mrf, const Labeling& labeling);
[[nodiscard]] inline double energy(const PixelMrf& mrf, const Labeling& labeling) {
  return energy(mrf.view(), labeling);
}

struct SubmodularityReport {
  bool submodular = true;
  std::vector<std::size_t> violating_terms;  // indices into the term list
};

[[nodiscard]] SubmodularityReport check_submodular(std::span<const PairwiseTerm> terms);
[[nodiscard]] inline bool is_submodular(const PixelMrf& mrf) {
  return check_submodular(mrf.pairs).submodular;
}

struct MinimizationResult {
  Labeling labeling;
  double energy = 0.0;
};

inline constexpr std::size_t kBruteForceMaxNodes = 24;

/// Exhaustive minimum. Ties go to the lexicographically smallest labeling
/// with node 0 as the most significant position.
[[nodiscard]] MinimizationResult brute_force_minimize(const MrfView& mrf);
[[nodiscard]] inline MinimizationResult brute_force_minimize(const PixelMrf& mrf) {
  return brute_force_minimize(mrf.view());
}

}  // namespace spmrf
