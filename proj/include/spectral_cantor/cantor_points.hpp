#pragma once

// Points of the Cantor group prod Z_2, the weighted Hamming metric delta_gamma
// and the standard intervals (cylinder sets) V(s, n).
//
// Coordinates are 1-based: coordinate n of a point is bit (n - 1) of the
// underlying storage. The same convention is used for atom indices of the
// truncated algebra: atom i at level N is the point whose coordinate n is
// bit (n - 1) of i.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spectral_cantor {

/// Scale parameter gamma, validated to lie strictly inside (0, 1).
class GammaParam {
 public:
  explicit GammaParam(double gamma);

  double value() const noexcept { return gamma_; }
  /// Hausdorff / box dimension log 2 / (-log gamma) of C_gamma.
  double dimension() const noexcept;

 private:
  double gamma_;
};

class CantorPoint {
 public:
  CantorPoint() = default;

  /// Parses a bit string, coordinate 1 leftmost. The support level is the
  /// length of the string.
  static CantorPoint parse(std::string_view bits);
  /// Point whose first `level` coordinates are the low bits of `index`.
  static CantorPoint from_index(std::uint64_t index, std::size_t level);

  /// Coordinate n (1-based). Coordinates beyond the storage are 0.
  int coordinate(std::size_t n) const noexcept;
  void set_coordinate(std::size_t n, int value);

  std::size_t support_level() const noexcept { return support_level_; }
  /// Largest n with coordinate(n) == 1, 0 for the zero point.
  std::size_t highest_set() const noexcept;

  /// Index of the level-`level` atom containing this point (coordinates
  /// 1..level packed into the low bits).
  std::uint64_t atom_index(std::size_t level) const;

  /// pi_n: zeroes every coordinate past n.
  CantorPoint truncated(std::size_t n) const;

  /// Bit string of length max(support_level, 1).
  std::string to_string() const;
  std::string to_string(std::size_t width) const;

  const std::vector<std::uint64_t>& blocks() const noexcept { return blocks_; }

  friend bool operator==(const CantorPoint& a, const CantorPoint& b) noexcept;

 private:
  std::vector<std::uint64_t> blocks_;
  std::size_t support_level_ = 0;
};

/// Least n with x(n) != y(n); nullopt when the points are equal.
std::optional<std::size_t> first_disagreement(const CantorPoint& x, const CantorPoint& y);

/// delta_gamma(x, y) = sum_n |x(n) - y(n)| gamma^(n-1) (1 - gamma), summed
/// exactly over the union of the supports.
double delta_gamma(const CantorPoint& x, const CantorPoint& y, const GammaParam& g);

/// Cylinder set V(s, n) = { x : pi_n(x) = s }.
struct StandardInterval {
  CantorPoint prefix;
  std::size_t level = 0;

  StandardInterval(CantorPoint prefix, std::size_t level);

  bool contains(const CantorPoint& x) const;
  /// gamma^level, the delta_gamma diameter of the interval.
  double diameter(const GammaParam& g) const;
};

/// Smallest standard interval guaranteed to contain every set of diameter
/// `diameter_bound` through u: n = ceil(log(bound / (1 - gamma)) / log gamma).
/// Requires diameter_bound < 1 - gamma.
StandardInterval standard_interval_of(const CantorPoint& u, double diameter_bound,
                                      const GammaParam& g);

/// All 2^n standard intervals of level n, ordered by atom index.
std::vector<StandardInterval> standard_intervals(std::size_t level);

/// sum over s in S_n of |V(s, n)|^t = 2^n gamma^(n t).
double cover_sum(std::size_t level, double t, const GammaParam& g);

}  // namespace spectral_cantor
