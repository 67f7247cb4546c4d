#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {

// How the admissible first-coordinate values are grouped into blocks.
//  Partition: {1,...,n} split into q consecutive intervals of near-equal
//             length, ordered from smallest to largest values.
//  Shifted:   narrow windows centered at t*n/q; windows are validated to be
//             disjoint and nonempty, reducing q if necessary.
enum class BlockMode { Partition, Shifted };

// Parameters of the product test function Psi = prod_t (1 + rho~ F_t).
//
// The floating-point fields rho and rho_tilde are the analytic normalizations
// sqrt(q) * n^{-(d-1)/2} and a * q^{1/4} * n^{-(d-1)/2}; exact-mode operations
// never consume them and instead use rho_surrogate, an exact rational
// stand-in of comparable size.
struct RieszParams {
  int d = 0;
  int n = 0;
  int q = 0;            // effective block count after clamping/validation
  int q_requested = 0;  // block count before clamping/validation
  Rational a{1, 2};
  Rational b{1, 4};
  Rational eps{0, 1};   // defaults to 1/d^2
  BlockMode mode = BlockMode::Partition;
  // Inclusive ranges [lo, hi] of first-coordinate values, 1-based, disjoint.
  std::vector<std::pair<int, int>> blocks;
  double rho = 0.0;
  double rho_tilde = 0.0;
  std::optional<Rational> rho_surrogate;

  // q / n^{d-1}: the square of the true L^2 normalization, exactly.
  Rational rho_sq() const;

  // The exact stand-in for rho_tilde; throws std::invalid_argument when no
  // surrogate was configured (exact-mode operations require one).
  Rational exact_rho_tilde() const;

  bool covers(int r1) const;     // r1 lies in some block
  int block_of(int r1) const;    // 1-based block index, 0 when uncovered
};

// Derives parameters for dimension d and total level n.  When q_request is
// empty, q = floor(a * n^eps); in both cases q is clamped to
// [1, max(2, n/2)] (derived values additionally to >= 2).  Shifted mode may
// reduce q further until the windows are disjoint and nonempty.
RieszParams derive_params(int d, int n, std::optional<int> q_request = {},
                          BlockMode mode = BlockMode::Partition,
                          std::optional<Rational> rho_surrogate = {},
                          std::optional<Rational> a = {},
                          std::optional<Rational> eps = {});

// All shapes with |r| = n whose first coordinate lies in block t (1-based),
// in lexicographic order.  Throws std::invalid_argument for t out of range.
std::vector<ShapeVector> block_shapes(const RieszParams& params, int t);

// The signed sum f = sum_R eps(R) h_R over all rectangles of shape r, with
// eps(R) = sign of coeffs.alpha(R) (zero counts as +1).  Satisfies f^2 == 1
// cellwise; returned at the minimal resolution that resolves every factor.
ExactGrid rfunction(const ShapeVector& r, const CoefficientField& coeffs);

// Same with an explicit sign map; throws std::invalid_argument when a
// rectangle of the shape is missing or a sign is not +-1.
ExactGrid rfunction(const ShapeVector& r,
                    const std::map<DyadicRectangle, int>& signs);

// F_t = sum of the r-functions of all shapes in block t.
ExactGrid block_sum(const RieszParams& params, int t,
                    const CoefficientField& coeffs);

// sum alpha(R) h_R over the volume-2^{-n} layer, plus the coarser rectangles
// when include_coarse is set.  Throws CapacityError when the resolving grid
// exceeds the dense-cell limit.
ExactGrid hyperbolic_sum(const CoefficientField& coeffs, bool include_coarse);

// Psi = prod_{t=1}^{q} (1 + rho~ F_t) with rho~ = params.exact_rho_tilde().
// The mean of Psi is exactly 1.
ExactGrid riesz_product(const RieszParams& params,
                        const CoefficientField& coeffs);

// Split of Psi by tuple distinctness: psi = 1 + sum_k sd_by_order[k-1] + neg.
// sd_by_order[k-1] collects, over block index tuples v_1 < ... < v_k, the
// products of r-functions whose shapes are pairwise distinct in every
// coordinate, weighted by rho~^k; neg is Psi minus one minus all such terms.
struct Decomposition {
  ExactGrid psi;
  std::vector<ExactGrid> sd_by_order;
  ExactGrid neg;
};

Decomposition decompose(const RieszParams& params,
                        const CoefficientField& coeffs);

// Exact summary statistics of a grid function (named for its intended use on
// the product test function): mean, L^1, L^2 squared, and the Lebesgue
// measure of the negative set; l2 is the floating-point root of l2_sq.
struct PsiStats {
  Rational mean;
  Rational l1;
  Rational l2_sq;
  Rational neg_measure;
  double l2 = 0.0;
};

PsiStats psi_stats(const ExactGrid& psi);

// Duality certificate for the sup-norm of the signed layer sum
// H = sum_{|R| = 2^{-n}} alpha(R) h_R:  ||H||_inf >= pairing / l1.
//
// pairing = <H, sum_k sd_k> computed through an independent integer Haar
// transform of the strongly distinct part; the construction guarantees (and
// this routine verifies) that all order-k >= 2 terms pair to zero and that
// the order-1 pairing equals rho~ * 2^{-n} * covered_mass, where
// covered_mass sums |alpha| over shapes whose first coordinate lies in a
// block (full_mass sums the whole layer).  Throws std::domain_error when
// l1 = 0 and std::logic_error if a verification fails.
struct DualityCertificate {
  Rational pairing;
  Rational l1;
  Rational lower_bound;
  Rational covered_mass;
  Rational full_mass;
  Rational order1_pairing;
};

DualityCertificate duality_certificate(const CoefficientField& coeffs,
                                       const RieszParams& params);

// Lower-bound forms for 2^{-n} sum_layer |alpha| against n^power * sup-norm:
//  Average:     power (d-1)/2; provable, asserted exactly via
//               lhs^2 <= #shapes * sup^2 (Cauchy-Schwarz + orthogonality).
//  Conjecture:  power (d-2)/2; recorded only.
//  Main:        power (d-1)/2 - 1/(4 d^2); recorded only.
//  TalagrandD2: power 0, dimension 2 only; recorded only.
enum class InequalityForm { Average, Conjecture, Main, TalagrandD2 };

struct InequalityReport {
  InequalityForm form = InequalityForm::Average;
  Rational lhs;       // 2^{-n} sum over the layer of |alpha|
  Rational sup;       // exact sup-norm of the full sum (layer + coarse)
  double power = 0;   // exponent of n in the right-hand side
  double rhs = 0;     // n^power * sup
  double ratio = 0;   // rhs / lhs (infinity when lhs = 0)
  bool asserted = false;
  bool holds = false;
};

InequalityReport verify_inequality(const CoefficientField& coeffs,
                                   InequalityForm form);

// Exact ||rho F||_p^p for even p, with rho supplied as its exact square
// (the true normalization has an irrational value; its square q/n^{d-1} is
// rational).  ratio = norm / sqrt(p).
struct MomentPoint {
  int p = 0;
  Rational norm_pow;
  double norm = 0;
  double ratio = 0;
};

std::vector<MomentPoint> moment_profile(const ExactGrid& F,
                                        const Rational& rho_sq,
                                        const std::vector<int>& ps);

}  // namespace hyperhaar
