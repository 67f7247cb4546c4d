#pragma once

#include <span>
#include <vector>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {

// Continuous piecewise-linear profile on [-1/2, 1/2]: values at strictly
// increasing breakpoints, affine in between. Used as the bump template that
// is translated and rescaled onto dyadic intervals.
struct PiecewiseLinear1D {
  std::vector<Rational> breaks;
  std::vector<Rational> values;
};

// The default odd tent: 0 at -1/2, -1 at -1/4, +1 at 1/4, 0 at 1/2
// (slope 4 on [-1/4, 1/4]). Mean zero; pairs positively with the Haar split.
PiecewiseLinear1D tent_profile();

// Exact integral of the profile over [-1/2, 1/2].
Rational profile_integral(const PiecewiseLinear1D& phi);

// c_phi = <phi, h> where h is -1 on [-1/2, 0) and +1 on [0, 1/2): the
// pairing constant of the profile against the Haar split of its support.
Rational profile_haar_pairing(const PiecewiseLinear1D& phi);

// Function on [0,1]^d that is affine in each variable separately on every
// cell of the product of per-axis breakpoint grids. Each axis grid starts at
// 0 and ends at 1; corner values are stored row major, last axis fastest.
class TensorPLFunction {
 public:
  // The zero function with trivial breakpoints {0, 1} per axis.
  static TensorPLFunction zero(int d);

  // Tensor product of 1-d functions given on full-range [0,1] grids.
  static TensorPLFunction tensor(
      const std::vector<PiecewiseLinear1D>& axes);

  int dim() const { return static_cast<int>(breaks_.size()); }
  const std::vector<Rational>& breakpoints(int axis) const {
    return breaks_[static_cast<size_t>(axis)];
  }
  const std::vector<Rational>& corners() const { return corners_; }

  // Point evaluation (multilinear interpolation of the cell corners).
  Rational evaluate(std::span<const Rational> x) const;

  // The same function on a refined grid: per-axis unions with extra
  // breakpoints (each extra point must lie in [0,1]).
  TensorPLFunction refined(
      const std::vector<std::vector<Rational>>& extra) const;

  friend TensorPLFunction add(const TensorPLFunction& f,
                              const TensorPLFunction& g);
  friend TensorPLFunction scale(const TensorPLFunction& f, const Rational& c);

 private:
  std::vector<std::vector<Rational>> breaks_;
  std::vector<Rational> corners_;

  friend Rational tensor_pl_sup(const TensorPLFunction& f);
  friend Rational tensor_pl_integral(const TensorPLFunction& f);
  friend Rational inner_product(const TensorPLFunction& f,
                                const GridFunction<Rational>& g);
};

// Exact supremum of |f| (attained at a corner of the product grid).
Rational tensor_pl_sup(const TensorPLFunction& f);

// Exact integral over [0,1]^d.
Rational tensor_pl_integral(const TensorPLFunction& f);

// Exact integral of f times a piecewise-constant grid function.
Rational inner_product(const TensorPLFunction& f,
                       const GridFunction<Rational>& g);

// The profile translated and rescaled onto the dyadic interval I, extended
// by zero to [0,1].
PiecewiseLinear1D profile_on_interval(const PiecewiseLinear1D& phi,
                                      const DyadicInterval& I);

// Tensor bump on a dyadic rectangle: product of per-axis rescaled profiles.
TensorPLFunction profile_on_rectangle(const PiecewiseLinear1D& phi,
                                      const DyadicRectangle& R);

}  // namespace hyperhaar
