#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/rational.hpp"
#include "hyperhaar/riesz.hpp"

namespace hyperhaar {

// N points in [0,1)^d with exact rational coordinates.
struct PointSet {
  int d = 0;
  std::string generator;  // provenance tag: van_der_corput, hammersley, ...
  std::vector<std::vector<Rational>> points;  // [i][axis]

  int64_t size() const { return static_cast<int64_t>(points.size()); }
};

enum class PointKind { VanDerCorput, Hammersley, Random, Grid };

// Deterministic point-set generators.
//   VanDerCorput (d = 2 only): point i = (i/N, bit reversal of i base 2).
//   Hammersley: point i = (i/N, radical inverse of i in bases 2, 3, 5, ...).
//   Random: independent coordinates k/2^20 from a seeded generator.
//   Grid: the product lattice {0, 1/k, ..., (k-1)/k}^d; N must equal k^d.
// Throws std::invalid_argument for unsupported (kind, d) or infeasible N.
PointSet generate(PointKind kind, int64_t N, int d, uint64_t seed = 0);

// CSV rows "x1,...,xd" with coordinates "p/q", integers, or decimals.
PointSet points_from_csv(std::istream& in, int d);
void write_points_csv(std::ostream& out, const PointSet& A);

// The discrepancy of the counting measure against volume at x in [0,1]^d:
//   D_N(x) = #{p in A : p_t < x_t for every axis, strictly} - N * prod_t x_t.
// Exact; throws std::domain_error when x lies outside [0,1]^d.
Rational d_eval(const PointSet& A, std::span<const Rational> x);

// Tensor factors of <D_N, h_R> in closed form:
//   linear_haar_factor(I)      = int_0^1 x h_I(x) dx = |I|^2 / 4,
//   counting_haar_factor(a, I) = <1_{(a,1]}, h_I> = -int_{I cap [0,a]} h_I,
// the latter a tent in a of height |I|/2 supported on the interior of I.
Rational linear_haar_factor(const DyadicInterval& I);
Rational counting_haar_factor(const Rational& a, const DyadicInterval& I);

// <D_N, h_R> = sum_p prod_t counting_haar_factor(p_t, R_t)
//              - N * prod_t linear_haar_factor(R_t).  Exact.
Rational haar_coeff_D(const PointSet& A, const DyadicRectangle& R);

// Bessel lower bound for ||D_N||_2 from the single layer |r| = n:
//   roth_l2_lower_sq = sum_{|r| = n} sum_{R of shape r} <D_N, h_R>^2 / |R|,
// exact; roth_l2_lower is its floating-point square root.  The family
// { h_R / sqrt|R| } is orthonormal, so the value can never exceed ||D_N||_2.
// Requires 2N <= 2^n.
Rational roth_l2_lower_sq(const PointSet& A, int n);
double roth_l2_lower(const PointSet& A, int n);

// max |D_N| over `samples` uniform points from a seeded generator: a numeric
// view of the sup that can only undershoot it.
double sampled_sup_abs(const PointSet& A, int64_t samples, uint64_t seed);

// L-infinity lower-bound certificate: pair D_N against the strongly distinct
// part Psi_sd of the product test function built with the pairing-maximizing
// signs eps_R = sgn<D_N, h_R>.  For any nonzero g,
//   ||D_N||_inf >= <D_N, g> / ||g||_1,
// and both sides are computed exactly (the pairing by per-cell closed-form
// integration of D_N against the piecewise-constant Psi_sd).
struct DiscrepancyCertificate {
  int64_t N = 0;
  int n = 0;
  int d = 0;
  Rational pairing;      // <D_N, Psi_sd>
  Rational l1;           // ||Psi_sd||_1
  Rational lower_bound;  // pairing / l1
  Rational roth_l2_sq;   // companion L^2 bound at the same n, squared
  double roth_l2 = 0.0;
};

// Requires params.d == A.d, 2N <= 2^n < 4N, shifted blocks, and an exact
// rho surrogate; throws std::invalid_argument otherwise and
// std::domain_error when ||Psi_sd||_1 = 0.
DiscrepancyCertificate discrepancy_certificate(const PointSet& A,
                                               const RieszParams& params);

}  // namespace hyperhaar
