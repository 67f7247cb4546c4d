#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperhaar/errors.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {

// Per-axis Haar levels (or grid resolutions); sum = logarithmic volume.
using ShapeVector = std::vector<int32_t>;

inline int64_t shape_total(const ShapeVector& s) {
  int64_t t = 0;
  for (int32_t v : s) t += v;
  return t;
}

// Half-open dyadic interval [pos*2^-level, (pos+1)*2^-level) in [0,1).
struct DyadicInterval {
  int32_t level = 0;
  int64_t pos = 0;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) =
      default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) =
      default;

  Rational left() const { return Rational(pos) * Rational::dyadic(level); }
  Rational right() const {
    return Rational(pos + 1) * Rational::dyadic(level);
  }
  Rational midpoint() const {
    return Rational(2 * pos + 1) * Rational::dyadic(level + 1);
  }
  Rational length() const { return Rational::dyadic(level); }

  // True iff `other` is contained in this interval (dyadic nesting).
  bool contains(const DyadicInterval& other) const {
    return other.level >= level && (other.pos >> (other.level - level)) == pos;
  }

  // Value of the L-infinity normalized Haar function h on a strictly finer
  // subinterval: -1 on the left half, +1 on the right half.
  int haar_on(const DyadicInterval& finer) const {
    return ((finer.pos >> (finer.level - level - 1)) & 1) ? 1 : -1;
  }
};

// Axis-parallel dyadic rectangle: a product of per-axis dyadic intervals.
struct DyadicRectangle {
  std::vector<DyadicInterval> sides;

  friend bool operator==(const DyadicRectangle&, const DyadicRectangle&) =
      default;
  friend auto operator<=>(const DyadicRectangle&, const DyadicRectangle&) =
      default;

  int dim() const { return static_cast<int>(sides.size()); }
  ShapeVector shape() const {
    ShapeVector s;
    s.reserve(sides.size());
    for (const auto& I : sides) s.push_back(I.level);
    return s;
  }
  int64_t total_level() const {
    int64_t t = 0;
    for (const auto& I : sides) t += I.level;
    return t;
  }
  Rational volume() const {
    int64_t t = total_level();
    if (t > 62) throw OverflowError("rectangle volume exponent too large");
    return Rational::dyadic(static_cast<int>(t));
  }
};

// Haar function value at a rational point of [0,1):
// 0 outside I, -1 on the left half, +1 on the right half.
int haar_eval(const DyadicInterval& I, const Rational& x);

// Tensor Haar value at a point of [0,1)^d: product of per-axis values.
int haar_tensor_eval(const DyadicRectangle& R, std::span<const Rational> x);

// All shape vectors in N^d with coordinate sum n, lexicographic order.
std::vector<ShapeVector> enumerate_shapes(int n, int d);

// The 2^|r| rectangles of shape r tiling [0,1)^d, lexicographic by position.
std::vector<DyadicRectangle> rectangles_of_shape(const ShapeVector& r);

// True iff in every coordinate the entries are pairwise distinct across the
// given shape vectors.
bool strongly_distinct(std::span<const ShapeVector> vecs);

// Result of multiplying Haar functions over a family of rectangles.
// If `disjoint`, the supports have empty intersection and the product is
// identically zero (sign/support are meaningless then).  Otherwise the
// product equals sign * h_support, and `mean_zero` says whether the product
// integrates to zero (the minimal side is unique in at least one coordinate).
struct HaarProduct {
  bool disjoint = false;
  int sign = 1;
  DyadicRectangle support;
  bool mean_zero = false;
};

// Multiplies the Haar functions of the given rectangles (same dimension).
// Throws CoincidenceError if two rectangles share a side in some coordinate.
HaarProduct multiply_haars(std::span<const DyadicRectangle> rects);

// Text form "k1:j1,k2:j2,...,kd:jd".
std::string format_rectangle(const DyadicRectangle& R);
DyadicRectangle parse_rectangle(std::string_view text);

}  // namespace hyperhaar
