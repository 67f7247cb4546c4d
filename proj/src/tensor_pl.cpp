#include "hyperhaar/tensor_pl.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyperhaar {

namespace {

struct Layout {
  std::vector<size_t> sizes;
  std::vector<size_t> strides;
  size_t total = 1;

  explicit Layout(const std::vector<std::vector<Rational>>& axes) {
    sizes.reserve(axes.size());
    for (const auto& a : axes) sizes.push_back(a.size());
    strides.assign(sizes.size(), 1);
    for (int t = static_cast<int>(sizes.size()) - 2; t >= 0; --t) {
      strides[t] = strides[t + 1] * sizes[t + 1];
    }
    for (size_t s : sizes) total *= s;
  }
};

void check_axis_grid(const std::vector<Rational>& breaks) {
  if (breaks.size() < 2 || breaks.front() != Rational(0) ||
      breaks.back() != Rational(1)) {
    throw std::invalid_argument(
        "tensor_pl: axis breakpoints must run from 0 to 1");
  }
  for (size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i - 1] < breaks[i])) {
      throw std::invalid_argument(
          "tensor_pl: breakpoints must be strictly increasing");
    }
  }
}

void check_profile(const PiecewiseLinear1D& phi) {
  if (phi.breaks.size() < 2 || phi.breaks.size() != phi.values.size()) {
    throw std::invalid_argument("profile: need matching breaks and values");
  }
  for (size_t i = 1; i < phi.breaks.size(); ++i) {
    if (!(phi.breaks[i - 1] < phi.breaks[i])) {
      throw std::invalid_argument("profile: breakpoints must increase");
    }
  }
}

// Index of the segment [b_i, b_{i+1}] containing x (ties resolved low).
size_t segment_of(const std::vector<Rational>& breaks, const Rational& x) {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  size_t i = static_cast<size_t>(it - breaks.begin());
  if (i > 0) --i;
  if (i >= breaks.size() - 1) i = breaks.size() - 2;
  return i;
}

Rational evaluate_profile(const PiecewiseLinear1D& phi, const Rational& x) {
  if (x < phi.breaks.front() || x > phi.breaks.back()) return Rational(0);
  const size_t i = segment_of(phi.breaks, x);
  const Rational& b0 = phi.breaks[i];
  const Rational& b1 = phi.breaks[i + 1];
  const Rational w = (x - b0) / (b1 - b0);
  return phi.values[i] * (Rational(1) - w) + phi.values[i + 1] * w;
}

// Interpolation plan for refining one axis: for each target breakpoint, the
// source segment and the affine weight within it.
struct AxisPlan {
  std::vector<size_t> low;
  std::vector<Rational> weight;
};

AxisPlan plan_axis(const std::vector<Rational>& from,
                   const std::vector<Rational>& to) {
  AxisPlan plan;
  plan.low.reserve(to.size());
  plan.weight.reserve(to.size());
  for (const Rational& x : to) {
    const size_t i = segment_of(from, x);
    plan.low.push_back(i);
    plan.weight.push_back((x - from[i]) / (from[i + 1] - from[i]));
  }
  return plan;
}

}  // namespace

PiecewiseLinear1D tent_profile() {
  PiecewiseLinear1D phi;
  phi.breaks = {Rational(-1, 2), Rational(-1, 4), Rational(1, 4),
                Rational(1, 2)};
  phi.values = {Rational(0), Rational(-1), Rational(1), Rational(0)};
  return phi;
}

Rational profile_integral(const PiecewiseLinear1D& phi) {
  check_profile(phi);
  detail::Rat128 acc;
  for (size_t i = 0; i + 1 < phi.breaks.size(); ++i) {
    acc.add((phi.breaks[i + 1] - phi.breaks[i]) *
            (phi.values[i] + phi.values[i + 1]) * Rational(1, 2));
  }
  return acc.to_rational();
}

Rational profile_haar_pairing(const PiecewiseLinear1D& phi) {
  check_profile(phi);
  if (phi.breaks.front() != Rational(-1, 2) ||
      phi.breaks.back() != Rational(1, 2)) {
    throw std::invalid_argument("profile: expected support [-1/2, 1/2]");
  }
  detail::Rat128 acc;
  for (size_t i = 0; i + 1 < phi.breaks.size(); ++i) {
    const Rational& b0 = phi.breaks[i];
    const Rational& b1 = phi.breaks[i + 1];
    auto piece = [&](const Rational& l, const Rational& r, int sign) {
      if (!(l < r)) return;
      const Rational vl = evaluate_profile(phi, l);
      const Rational vr = evaluate_profile(phi, r);
      acc.add((r - l) * (vl + vr) * Rational(sign, 2));
    };
    // Split the segment at 0: h is -1 below and +1 above.
    const Rational zero(0);
    piece(b0, std::min(b1, zero), -1);
    piece(std::max(b0, zero), b1, 1);
  }
  return acc.to_rational();
}

TensorPLFunction TensorPLFunction::zero(int d) {
  if (d < 1) throw std::invalid_argument("tensor_pl: need d >= 1");
  TensorPLFunction f;
  f.breaks_.assign(static_cast<size_t>(d), {Rational(0), Rational(1)});
  f.corners_.assign(size_t{1} << d, Rational(0));
  return f;
}

TensorPLFunction TensorPLFunction::tensor(
    const std::vector<PiecewiseLinear1D>& axes) {
  if (axes.empty()) throw std::invalid_argument("tensor_pl: need d >= 1");
  TensorPLFunction f;
  for (const auto& a : axes) {
    check_profile(a);
    check_axis_grid(a.breaks);
    f.breaks_.push_back(a.breaks);
  }
  const Layout layout(f.breaks_);
  f.corners_.assign(layout.total, Rational(1));
  // Fill the product: iterate all corners, multiplying per-axis values.
  for (size_t lin = 0; lin < layout.total; ++lin) {
    Rational v(1);
    size_t rem = lin;
    for (size_t t = 0; t < axes.size(); ++t) {
      const size_t i = rem / layout.strides[t];
      rem %= layout.strides[t];
      v = v * axes[t].values[i];
      if (v.is_zero()) break;
    }
    f.corners_[lin] = v;
  }
  return f;
}

Rational TensorPLFunction::evaluate(std::span<const Rational> x) const {
  const int d = dim();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("tensor_pl: dimension mismatch");
  }
  std::vector<size_t> seg(static_cast<size_t>(d));
  std::vector<Rational> w(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) {
    const auto& breaks = breaks_[static_cast<size_t>(t)];
    if (x[t] < breaks.front() || x[t] > breaks.back()) {
      throw std::domain_error("tensor_pl: point outside [0,1]^d");
    }
    const size_t i = segment_of(breaks, x[t]);
    seg[static_cast<size_t>(t)] = i;
    w[static_cast<size_t>(t)] = (x[t] - breaks[i]) / (breaks[i + 1] - breaks[i]);
  }
  const Layout layout(breaks_);
  detail::Rat128 acc;
  for (size_t sel = 0; sel < (size_t{1} << d); ++sel) {
    Rational weight(1);
    size_t lin = 0;
    for (int t = 0; t < d; ++t) {
      const bool hi = (sel >> t) & 1;
      weight = weight * (hi ? w[static_cast<size_t>(t)]
                            : Rational(1) - w[static_cast<size_t>(t)]);
      lin += (seg[static_cast<size_t>(t)] + (hi ? 1 : 0)) *
             layout.strides[static_cast<size_t>(t)];
    }
    if (!weight.is_zero()) acc.add_product(weight, corners_[lin]);
  }
  return acc.to_rational();
}

TensorPLFunction TensorPLFunction::refined(
    const std::vector<std::vector<Rational>>& extra) const {
  const int d = dim();
  if (extra.size() != static_cast<size_t>(d)) {
    throw std::invalid_argument("tensor_pl: dimension mismatch");
  }
  TensorPLFunction out = *this;
  for (int t = 0; t < d; ++t) {
    const auto& cur = out.breaks_[static_cast<size_t>(t)];
    std::vector<Rational> merged = cur;
    for (const Rational& x : extra[static_cast<size_t>(t)]) {
      if (x < Rational(0) || x > Rational(1)) {
        throw std::invalid_argument("tensor_pl: breakpoint outside [0,1]");
      }
      merged.push_back(x);
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    if (merged == cur) continue;
    // Interpolate along axis t onto the merged grid.
    const AxisPlan plan = plan_axis(cur, merged);
    const Layout from(out.breaks_);
    auto to_breaks = out.breaks_;
    to_breaks[static_cast<size_t>(t)] = merged;
    const Layout to(to_breaks);
    std::vector<Rational> next(to.total, Rational(0));
    const size_t inner = to.strides[static_cast<size_t>(t)];
    const size_t n_from = from.sizes[static_cast<size_t>(t)];
    const size_t n_to = to.sizes[static_cast<size_t>(t)];
    const size_t outer = to.total / (inner * n_to);
    for (size_t o = 0; o < outer; ++o) {
      const size_t src_base = o * n_from * inner;
      const size_t dst_base = o * n_to * inner;
      for (size_t i = 0; i < n_to; ++i) {
        const size_t lo = plan.low[i];
        const Rational& w = plan.weight[i];
        for (size_t in = 0; in < inner; ++in) {
          const Rational& a = out.corners_[src_base + lo * inner + in];
          if (w.is_zero()) {
            next[dst_base + i * inner + in] = a;
          } else {
            const Rational& b = out.corners_[src_base + (lo + 1) * inner + in];
            next[dst_base + i * inner + in] =
                a + (b - a) * w;
          }
        }
      }
    }
    out.breaks_ = std::move(to_breaks);
    out.corners_ = std::move(next);
  }
  return out;
}

TensorPLFunction add(const TensorPLFunction& f, const TensorPLFunction& g) {
  if (f.dim() != g.dim()) {
    throw std::invalid_argument("tensor_pl: dimension mismatch");
  }
  const TensorPLFunction fr = f.refined(g.breaks_);
  const TensorPLFunction gr = g.refined(f.breaks_);
  TensorPLFunction out = fr;
  for (size_t i = 0; i < out.corners_.size(); ++i) {
    out.corners_[i] = out.corners_[i] + gr.corners_[i];
  }
  return out;
}

TensorPLFunction scale(const TensorPLFunction& f, const Rational& c) {
  TensorPLFunction out = f;
  for (auto& v : out.corners_) v = v * c;
  return out;
}

Rational tensor_pl_sup(const TensorPLFunction& f) {
  Rational best(0);
  for (const auto& v : f.corners_) best = std::max(best, abs(v));
  return best;
}

Rational tensor_pl_integral(const TensorPLFunction& f) {
  // Contract one axis at a time with the trapezoid rule (exact for PL).
  std::vector<Rational> data = f.corners_;
  auto breaks = f.breaks_;
  while (!breaks.empty()) {
    const auto axis = breaks.back();
    breaks.pop_back();
    const size_t n = axis.size();
    const size_t outer = data.size() / n;
    std::vector<Rational> next(outer, Rational(0));
    for (size_t o = 0; o < outer; ++o) {
      detail::Rat128 acc;
      for (size_t i = 0; i + 1 < n; ++i) {
        acc.add((axis[i + 1] - axis[i]) *
                (data[o * n + i] + data[o * n + i + 1]) * Rational(1, 2));
      }
      next[o] = acc.to_rational();
    }
    data = std::move(next);
  }
  return data[0];
}

Rational inner_product(const TensorPLFunction& f,
                       const GridFunction<Rational>& g) {
  const int d = f.dim();
  if (g.dim() != d) {
    throw std::invalid_argument("tensor_pl: dimension mismatch");
  }
  // Refine f so no cell straddles a boundary of g's dyadic grid.
  std::vector<std::vector<Rational>> extra(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) {
    const int m = g.resolution()[t];
    for (int64_t j = 0; j <= (int64_t{1} << m); ++j) {
      extra[static_cast<size_t>(t)].push_back(Rational(j) *
                                              Rational::dyadic(m));
    }
  }
  const TensorPLFunction rf = f.refined(extra);
  const Layout layout(rf.breaks_);
  // Per axis: segment length and the index of the owning dyadic cell.
  std::vector<std::vector<Rational>> seg_len(static_cast<size_t>(d));
  std::vector<std::vector<int64_t>> seg_cell(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) {
    const auto& breaks = rf.breaks_[static_cast<size_t>(t)];
    const int m = g.resolution()[t];
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
      seg_len[static_cast<size_t>(t)].push_back(breaks[i + 1] - breaks[i]);
      const Rational mid =
          (breaks[i] + breaks[i + 1]) * Rational(1, 2) *
          Rational(int64_t{1} << m);
      seg_cell[static_cast<size_t>(t)].push_back(mid.num() / mid.den());
    }
  }
  detail::Rat128 acc;
  std::vector<size_t> idx(static_cast<size_t>(d), 0);
  // Walk all cells of the refined product grid.
  while (true) {
    Rational vol(1);
    int64_t gcell = 0;
    for (int t = 0; t < d; ++t) {
      vol = vol * seg_len[static_cast<size_t>(t)][idx[static_cast<size_t>(t)]];
      gcell = (gcell << g.resolution()[t]) |
              seg_cell[static_cast<size_t>(t)][idx[static_cast<size_t>(t)]];
    }
    // Average of the 2^d corner values (exact cell integral of the
    // multilinear piece is volume times the value at the center).
    detail::Rat128 corner_sum;
    for (size_t sel = 0; sel < (size_t{1} << d); ++sel) {
      size_t lin = 0;
      for (int t = 0; t < d; ++t) {
        lin += (idx[static_cast<size_t>(t)] + ((sel >> t) & 1)) *
               layout.strides[static_cast<size_t>(t)];
      }
      corner_sum.add(rf.corners_[lin]);
    }
    acc.add(corner_sum.to_rational() * Rational(1, int64_t{1} << d) * vol *
            g.at(gcell));
    // Advance the cell multi-index (per-axis cell counts are sizes - 1).
    int t = d - 1;
    while (t >= 0) {
      if (++idx[static_cast<size_t>(t)] <
          layout.sizes[static_cast<size_t>(t)] - 1) {
        break;
      }
      idx[static_cast<size_t>(t)] = 0;
      --t;
    }
    if (t < 0) break;
  }
  return acc.to_rational();
}

PiecewiseLinear1D profile_on_interval(const PiecewiseLinear1D& phi,
                                      const DyadicInterval& I) {
  check_profile(phi);
  if (phi.breaks.front() != Rational(-1, 2) ||
      phi.breaks.back() != Rational(1, 2) ||
      !phi.values.front().is_zero() || !phi.values.back().is_zero()) {
    throw std::invalid_argument(
        "profile: must be supported in [-1/2, 1/2] with zero endpoints");
  }
  const Rational len = I.length();
  const Rational left = I.left();
  PiecewiseLinear1D out;
  if (!(left == Rational(0))) {
    out.breaks.push_back(Rational(0));
    out.values.push_back(Rational(0));
  }
  for (size_t i = 0; i < phi.breaks.size(); ++i) {
    out.breaks.push_back(left + (phi.breaks[i] + Rational(1, 2)) * len);
    out.values.push_back(phi.values[i]);
  }
  if (!(out.breaks.back() == Rational(1))) {
    out.breaks.push_back(Rational(1));
    out.values.push_back(Rational(0));
  }
  return out;
}

TensorPLFunction profile_on_rectangle(const PiecewiseLinear1D& phi,
                                      const DyadicRectangle& R) {
  std::vector<PiecewiseLinear1D> axes;
  axes.reserve(static_cast<size_t>(R.dim()));
  for (const auto& I : R.sides) axes.push_back(profile_on_interval(phi, I));
  return TensorPLFunction::tensor(axes);
}

}  // namespace hyperhaar
