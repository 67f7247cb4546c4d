#pragma once

#include <utility>
#include <vector>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/rational.hpp"
#include "hyperhaar/riesz.hpp"
#include "hyperhaar/tensor_pl.hpp"

namespace hyperhaar {

// Sup-norm certificate for the smooth layer sum
//   Phi = sum_{|r| = n} sum_{R of shape r} alpha(R) phi_R,
// where phi_R is the profile translated and rescaled onto R.  The pairing
// of Phi against the strongly distinct part of the Riesz product built from
// the coefficient signs certifies ||Phi||_inf >= pairing / l1; the exact
// sup from the tensor grid is reported alongside for comparison.
//
// Coefficients with |alpha| > 1 are divided by max|alpha| first (both sides
// of the target inequality are homogeneous); rescale records the divisor and
// all reported quantities refer to the rescaled field.
struct SmoothCertificate {
  Rational c_phi;          // <phi, h> on the profile's own support
  Rational diag_constant;  // c_phi^d: per-rectangle tensor pairing / volume
  Rational rescale;        // divisor applied to the coefficients (>= 1)
  Rational layer_mass;     // sum over the layer of |alpha|
  Rational covered_mass;   // same, restricted to block-covered shapes
  bool coverage_ok = false;     // 4 * covered_mass >= layer_mass
  bool repartitioned = false;   // blocks were rebuilt to restore coverage
  std::vector<std::pair<int, int>> blocks;  // first-coordinate windows used
  Rational order1_pairing;  // <Phi, sd_1> = rho~ * diag * 2^{-n} * covered
  Rational pairing;         // <Phi, sum_k sd_k>
  Rational l1;              // ||sum_k sd_k||_1
  Rational lower_bound;     // pairing / l1, a certified bound for sup|Phi|
  Rational sup_norm;        // exact sup|Phi| over [0,1]^d
};

// Requires phi continuous piecewise-linear with support [-1/2, 1/2]
// (zero endpoint values), mean zero, and c_phi = <phi, h> > 0; throws
// std::invalid_argument otherwise.  When the block windows of params cover
// less than a quarter of the layer mass, the windows are rebuilt (alternating
// consecutive windows, the heavier of the two families) and the outcome is
// recorded; coverage_ok reports the final state.  Throws std::domain_error
// when the strongly distinct part vanishes in L^1 and std::logic_error if an
// exact internal identity fails to verify.
SmoothCertificate smooth_certificate(const CoefficientField& coeffs,
                                     const RieszParams& params,
                                     const PiecewiseLinear1D& phi);

}  // namespace hyperhaar
