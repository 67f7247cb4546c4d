#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {

// Rational coefficients alpha(R) over dyadic rectangles in [0,1)^d, split
// into the volume-2^{-n} layer and an optional coarser part (volume > 2^{-n}).
class CoefficientField {
 public:
  CoefficientField(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }

  const std::map<DyadicRectangle, Rational>& layer() const { return layer_; }
  const std::map<DyadicRectangle, Rational>& coarse() const { return coarse_; }

  // Stores alpha(R); the rectangle is routed by its volume. Zero values are
  // kept out of the maps (absent means zero).
  void set(const DyadicRectangle& R, const Rational& value);

  // alpha(R), zero if absent.
  Rational alpha(const DyadicRectangle& R) const;

  // Sign of alpha(R) with the convention sgn(0) = +1.
  int sign_of(const DyadicRectangle& R) const {
    return alpha(R).sign() < 0 ? -1 : 1;
  }

  // Sum of |alpha(R)| over the volume-2^{-n} layer.
  Rational layer_abs_sum() const;

  // Same, restricted to rectangles whose shape satisfies the predicate.
  Rational layer_abs_sum_if(
      const std::function<bool(const ShapeVector&)>& keep) const;

  // Sum of alpha(R)^2 * |R| over layer and coarse parts (the exact squared
  // L2 norm of the associated Haar sum, by orthogonality).
  Rational l2_sq() const;

  // Largest |alpha| over all stored entries.
  Rational max_abs() const;

  // All coefficients scaled by c (used to normalize |alpha| <= 1).
  CoefficientField scaled(const Rational& c) const;

  // alpha identically 1 on the layer.
  static CoefficientField ones(int n, int d);

  // Deterministic pseudo-random alpha on the layer: dyadic rationals
  // num/64 with num uniform in [-64, 64].
  static CoefficientField random_rational(int n, int d, uint64_t seed);

  // Deterministic pseudo-random alpha in {-1, +1} on the layer.
  static CoefficientField random_signs(int n, int d, uint64_t seed);

  // CSV rows "k1:j1,...,kd:jd,value" (value a rational "p/q" or integer).
  static CoefficientField from_csv(std::istream& in, int n, int d);
  void write_csv(std::ostream& out) const;

 private:
  int n_;
  int d_;
  std::map<DyadicRectangle, Rational> layer_;
  std::map<DyadicRectangle, Rational> coarse_;
};

}  // namespace hyperhaar
