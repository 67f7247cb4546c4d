#pragma once

// Integer-grid machinery shared by the product test function and the
// coincidence-graph reconstruction.  All product functions built from
// +-1-signed level sums have rational values with a small common
// denominator, so the heavy grids are built as int32 numerators and only
// converted to rational grids at the API boundary.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/riesz.hpp"
#include "hyperhaar/spectrum.hpp"

namespace hyperhaar::detail {

struct IntGrid {
  ShapeVector res;
  std::vector<int32_t> v;

  IntGrid() = default;
  explicit IntGrid(ShapeVector m) : res(std::move(m)) {
    check_resolution(res);
    v.assign(size_t{1} << shape_total(res), 0);
  }
  int64_t size() const { return static_cast<int64_t>(v.size()); }
};

// Signs of the rectangles of shape r under coeffs (zero counts as +1),
// indexed by the position bits folded axis 0 first:
// idx = ((... pos_0) << r_1 | pos_1) << r_2 | ...
std::vector<int8_t> sign_table(const ShapeVector& r,
                               const CoefficientField& coeffs);

// One member of a tuple product: a shape together with its sign table.
struct SignedShape {
  ShapeVector r;
  std::vector<int8_t> eps;
};

// Resolution a grid must have to evaluate all members cellwise.
ShapeVector product_resolution(std::span<const SignedShape* const> members);

// g += scale * prod_i f_{members[i]} evaluated cellwise; g.res must resolve
// every member (res[t] >= r[t] + 1 componentwise).  Members may share
// coordinate levels: the evaluation is pointwise, so no product rule is
// needed.
void add_sign_product(IntGrid& g, std::span<const SignedShape* const> members,
                      int32_t scale);

// dst += src replicated onto dst's (componentwise finer or equal) grid.
void add_refined(IntGrid& dst, const IntGrid& src);

// Sums many small product grids without touching the full resolution more
// than necessary: grids are grouped by resolution and merged join-ascending.
class BucketAccumulator {
 public:
  void add(std::span<const SignedShape* const> members, int32_t scale);

  bool empty() const { return buckets_.empty(); }

  // Join of all bucket resolutions (call only when not empty).
  ShapeVector joint_resolution() const;

  // Folds every bucket into one grid at the requested resolution, which must
  // refine joint_resolution().  Leaves the accumulator empty.
  IntGrid fold(const ShapeVector& target);

 private:
  std::map<ShapeVector, IntGrid> buckets_;
};

// F_t as an integer grid at the block resolution, built by spectral
// synthesis (cost: d sweeps over the grid, independent of the block size).
IntGrid build_block_int(const RieszParams& params, int t,
                        const CoefficientField& coeffs);

// Resolution of the product test function: the join of all block
// resolutions.
ShapeVector psi_resolution(const RieszParams& params);

// Numerator grid of prod_{t in ts} (s + p F_t) over denominator s^{|ts|},
// where rho~ = p/s is the exact surrogate.  ts holds 1-based block indices.
IntGrid build_partial_product_int(const RieszParams& params,
                                  const CoefficientField& coeffs,
                                  std::span<const int> ts);

// Raw strongly distinct tuple sums S_k = sum over v_1 < ... < v_k of
// sum_{pairwise coordinate-distinct tuples} prod f (no rho~ weight);
// index k-1 holds order k.
std::vector<IntGrid> build_sd_ints(const RieszParams& params,
                                   const CoefficientField& coeffs);

// Rational grid with values v * scale.
ExactGrid to_exact(const IntGrid& g, const Rational& scale);

// Exact pairing <sum_layer alpha h_R, g * scale> via the unnormalized
// integer Haar transform of g.
Rational layer_pairing_int(const IntGrid& g, const Rational& scale,
                           const CoefficientField& coeffs);

}  // namespace hyperhaar::detail
