#include "hyperhaar/smooth.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/grid.hpp"

namespace hyperhaar {
namespace {

void check_profile_for_certificate(const PiecewiseLinear1D& phi,
                                   const Rational& c_phi) {
  if (phi.breaks.size() < 2 || phi.breaks.front() != Rational(-1, 2) ||
      phi.breaks.back() != Rational(1, 2)) {
    throw std::invalid_argument(
        "smooth_certificate: profile support must be [-1/2, 1/2]");
  }
  if (!phi.values.front().is_zero() || !phi.values.back().is_zero()) {
    throw std::invalid_argument(
        "smooth_certificate: profile must vanish at the support endpoints");
  }
  if (!profile_integral(phi).is_zero()) {
    throw std::invalid_argument(
        "smooth_certificate: profile must have mean zero");
  }
  if (c_phi.sign() <= 0) {
    throw std::invalid_argument(
        "smooth_certificate: profile must pair positively with the Haar "
        "split");
  }
}

// 2q near-equal consecutive windows over [1, n]; the heavier of the two
// alternating families becomes the new block list.  Returns the family and
// its covered mass.
std::pair<std::vector<std::pair<int, int>>, Rational> repartition(
    const CoefficientField& coeffs, int n, int q) {
  const int w = std::min(2 * q, n);
  std::vector<std::pair<int, int>> windows;
  const int base = n / w;
  const int rem = n % w;
  int lo = 1;
  for (int i = 0; i < w; ++i) {
    const int len = base + (i < rem ? 1 : 0);
    windows.emplace_back(lo, lo + len - 1);
    lo += len;
  }
  Rational best_mass(-1);
  std::vector<std::pair<int, int>> best;
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<std::pair<int, int>> family;
    for (size_t i = static_cast<size_t>(parity); i < windows.size(); i += 2) {
      family.push_back(windows[i]);
    }
    if (family.empty()) continue;
    const Rational mass = coeffs.layer_abs_sum_if([&](const ShapeVector& r) {
      for (const auto& [a, b] : family) {
        if (a <= r[0] && r[0] <= b) return true;
      }
      return false;
    });
    if (mass > best_mass) {
      best_mass = mass;
      best = std::move(family);
    }
  }
  return {std::move(best), std::move(best_mass)};
}

// Phi restricted to one shape: sum over the shape's rectangles of
// alpha(R) phi_R.
TensorPLFunction shape_bump_sum(const CoefficientField& coeffs,
                                const ShapeVector& r,
                                const PiecewiseLinear1D& phi) {
  TensorPLFunction out = TensorPLFunction::zero(static_cast<int>(r.size()));
  for (const DyadicRectangle& R : rectangles_of_shape(r)) {
    const Rational a = coeffs.alpha(R);
    if (a.is_zero()) continue;
    out = add(out, scale(profile_on_rectangle(phi, R), a));
  }
  return out;
}

}  // namespace

SmoothCertificate smooth_certificate(const CoefficientField& coeffs,
                                     const RieszParams& params,
                                     const PiecewiseLinear1D& phi) {
  if (coeffs.n() != params.n || coeffs.d() != params.d) {
    throw std::invalid_argument("smooth_certificate: parameter mismatch");
  }
  SmoothCertificate out;
  out.c_phi = profile_haar_pairing(phi);
  check_profile_for_certificate(phi, out.c_phi);
  out.diag_constant = Rational(1);
  for (int t = 0; t < params.d; ++t) out.diag_constant *= out.c_phi;

  const Rational max_abs = coeffs.max_abs();
  out.rescale = max_abs > Rational(1) ? max_abs : Rational(1);
  const CoefficientField field =
      out.rescale == Rational(1)
          ? coeffs
          : coeffs.scaled(Rational(1) / out.rescale);

  out.layer_mass = field.layer_abs_sum_if([](const ShapeVector&) {
    return true;
  });
  RieszParams working = params;
  auto covered_by = [&](const RieszParams& p) {
    return field.layer_abs_sum_if(
        [&](const ShapeVector& r) { return p.covers(r[0]); });
  };
  out.covered_mass = covered_by(working);
  if (Rational(4) * out.covered_mass < out.layer_mass) {
    auto [family, mass] = repartition(field, params.n, params.q);
    if (!family.empty() && mass > out.covered_mass) {
      working.blocks = std::move(family);
      working.q = static_cast<int>(working.blocks.size());
      out.covered_mass = mass;
      out.repartitioned = true;
    }
  }
  out.coverage_ok = Rational(4) * out.covered_mass >= out.layer_mass;
  out.blocks = working.blocks;

  const Rational rho_tilde = working.exact_rho_tilde();
  const Decomposition dec = decompose(working, field);
  ExactGrid sd = dec.sd_by_order.front();
  for (size_t k = 1; k < dec.sd_by_order.size(); ++k) {
    sd = add(sd, dec.sd_by_order[k]);
  }
  out.l1 = norm_lp_pow(sd, 1);
  if (out.l1.is_zero()) {
    throw std::domain_error(
        "smooth_certificate: strongly distinct part vanishes, certificate "
        "undefined");
  }

  // Phi and the per-shape diagonal identity
  // <phi_r, f_r> = c_phi^d * 2^{-n} * sum_R |alpha(R)|, which also pins the
  // order-1 pairing (cross shapes in the layer pair to zero: some coordinate
  // shrinks, and the profile has mean zero on every finer interval's parent).
  const Rational layer_vol = Rational::dyadic(params.n);
  TensorPLFunction bump_total = TensorPLFunction::zero(params.d);
  for (const ShapeVector& r : enumerate_shapes(params.n, params.d)) {
    const TensorPLFunction bump = shape_bump_sum(field, r, phi);
    const Rational mass = field.layer_abs_sum_if(
        [&](const ShapeVector& s) { return s == r; });
    const Rational diag = inner_product(bump, rfunction(r, field));
    if (diag != out.diag_constant * layer_vol * mass) {
      throw std::logic_error(
          "smooth_certificate: diagonal pairing identity failed");
    }
    bump_total = add(bump_total, bump);
  }

  out.order1_pairing = inner_product(bump_total, dec.sd_by_order.front());
  if (out.order1_pairing !=
      rho_tilde * out.diag_constant * layer_vol * out.covered_mass) {
    throw std::logic_error(
        "smooth_certificate: order-1 pairing identity failed");
  }
  out.pairing = inner_product(bump_total, sd);
  out.lower_bound = out.pairing / out.l1;
  out.sup_norm = tensor_pl_sup(bump_total);
  if (out.lower_bound > out.sup_norm) {
    throw std::logic_error(
        "smooth_certificate: duality bound exceeds the exact sup");
  }
  return out;
}

}  // namespace hyperhaar
