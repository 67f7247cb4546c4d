#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/errors.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {

// Dense grids are capped at 2^26 cells: predictable memory, no sparsity bugs.
inline constexpr int kMaxGridBits = 26;

namespace detail {

inline void check_resolution(const ShapeVector& m) {
  if (m.empty()) throw std::invalid_argument("grid: empty resolution");
  int64_t total = 0;
  for (int32_t b : m) {
    if (b < 0) throw std::invalid_argument("grid: negative resolution");
    total += b;
  }
  if (total > kMaxGridBits) {
    throw CapacityError("grid: resolution " + std::to_string(total) +
                        " bits exceeds capacity " +
                        std::to_string(kMaxGridBits));
  }
}

// Bit offset of each axis inside the row-major linear index (last axis
// occupies the lowest bits).
inline std::vector<int> axis_shifts(const ShapeVector& m) {
  std::vector<int> shift(m.size(), 0);
  int acc = 0;
  for (int t = static_cast<int>(m.size()) - 1; t >= 0; --t) {
    shift[t] = acc;
    acc += m[t];
  }
  return shift;
}

// Maps linear cell indices of a fine grid onto a componentwise-coarser grid.
class CellMap {
 public:
  CellMap(const ShapeVector& fine, const ShapeVector& coarse) {
    if (fine.size() != coarse.size()) {
      throw std::invalid_argument("grid: dimension mismatch");
    }
    const auto fs = axis_shifts(fine);
    const auto cs = axis_shifts(coarse);
    for (size_t t = 0; t < fine.size(); ++t) {
      if (coarse[t] > fine[t]) {
        throw std::invalid_argument("grid: coarse resolution exceeds fine");
      }
      if (coarse[t] == 0) continue;  // contributes no bits
      Axis a;
      a.fine_shift = fs[t];
      a.mask = (int64_t{1} << fine[t]) - 1;
      a.drop = fine[t] - coarse[t];
      a.coarse_shift = cs[t];
      axes_.push_back(a);
    }
  }

  int64_t operator()(int64_t fine_lin) const {
    int64_t out = 0;
    for (const Axis& a : axes_) {
      out |= (((fine_lin >> a.fine_shift) & a.mask) >> a.drop)
             << a.coarse_shift;
    }
    return out;
  }

 private:
  struct Axis {
    int fine_shift;
    int64_t mask;
    int drop;
    int coarse_shift;
  };
  std::vector<Axis> axes_;
};

}  // namespace detail

// Piecewise-constant function on the anisotropic dyadic grid with per-axis
// resolutions m; one value per cell, row major with the last axis fastest.
// T is Rational (exact mode) or double (float mode); the mode is part of the
// type, so mixed-mode combination is rejected at compile time.
template <typename T>
class GridFunction {
  static_assert(std::is_same_v<T, Rational> || std::is_same_v<T, double>,
                "GridFunction supports Rational (exact) and double (float)");

 public:
  GridFunction() = default;

  GridFunction(ShapeVector resolution, const T& fill)
      : resolution_(std::move(resolution)) {
    detail::check_resolution(resolution_);
    values_.assign(static_cast<size_t>(size()), fill);
  }

  static GridFunction from_values(ShapeVector resolution,
                                  std::vector<T> values) {
    detail::check_resolution(resolution);
    GridFunction f;
    f.resolution_ = std::move(resolution);
    if (static_cast<int64_t>(values.size()) != f.size()) {
      throw std::invalid_argument("grid: value count does not match 2^|m|");
    }
    f.values_ = std::move(values);
    return f;
  }

  const ShapeVector& resolution() const { return resolution_; }
  int dim() const { return static_cast<int>(resolution_.size()); }
  int64_t total_bits() const { return shape_total(resolution_); }
  int64_t size() const { return int64_t{1} << total_bits(); }
  Rational cell_volume() const {
    return Rational::dyadic(static_cast<int>(total_bits()));
  }

  std::span<const T> values() const { return values_; }
  std::span<T> values_mut() { return values_; }
  const T& at(int64_t linear) const {
    return values_[static_cast<size_t>(linear)];
  }
  T& at(int64_t linear) { return values_[static_cast<size_t>(linear)]; }

  friend bool operator==(const GridFunction& a, const GridFunction& b) {
    return a.resolution_ == b.resolution_ && a.values_ == b.values_;
  }

 private:
  ShapeVector resolution_;
  std::vector<T> values_;
};

using ExactGrid = GridFunction<Rational>;
using FloatGrid = GridFunction<double>;

namespace detail {

template <typename T>
struct Accum;

template <>
struct Accum<Rational> {
  Rat128 acc;
  void add(const Rational& v) { acc.add(v); }
  void add_product(const Rational& a, const Rational& b) {
    acc.add_product(a, b);
  }
  Rational result() { return acc.to_rational(); }
};

template <>
struct Accum<double> {
  double acc = 0.0;
  void add(double v) { acc += v; }
  void add_product(double a, double b) { acc += a * b; }
  double result() const { return acc; }
};

template <typename T>
T abs_value(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return abs(v);
  } else {
    return std::fabs(v);
  }
}

}  // namespace detail

// Componentwise maximum of two resolutions (the common refinement).
inline ShapeVector common_resolution(const ShapeVector& a,
                                     const ShapeVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("grid: dimension mismatch");
  }
  ShapeVector m(a.size());
  for (size_t t = 0; t < a.size(); ++t) m[t] = std::max(a[t], b[t]);
  return m;
}

// Same function represented on a componentwise finer grid (values replicated
// from each parent cell to its children).
template <typename T>
GridFunction<T> refine(const GridFunction<T>& f, const ShapeVector& finer) {
  if (finer == f.resolution()) return f;
  detail::check_resolution(finer);
  detail::CellMap map(finer, f.resolution());
  GridFunction<T> out(finer, T{});
  const int64_t cells = out.size();
  auto dst = out.values_mut();
  auto src = f.values();
  for (int64_t i = 0; i < cells; ++i) {
    dst[static_cast<size_t>(i)] = src[static_cast<size_t>(map(i))];
  }
  return out;
}

enum class CombineOp { Add, Mul };

// Cellwise sum or product on the common refinement of the two grids.
template <typename T>
GridFunction<T> combine(const GridFunction<T>& f, const GridFunction<T>& g,
                        CombineOp op) {
  const ShapeVector m = common_resolution(f.resolution(), g.resolution());
  detail::CellMap fmap(m, f.resolution());
  detail::CellMap gmap(m, g.resolution());
  GridFunction<T> out(m, T{});
  const int64_t cells = out.size();
  auto dst = out.values_mut();
  auto fv = f.values();
  auto gv = g.values();
  if (op == CombineOp::Add) {
    for (int64_t i = 0; i < cells; ++i) {
      dst[static_cast<size_t>(i)] = fv[static_cast<size_t>(fmap(i))] +
                                    gv[static_cast<size_t>(gmap(i))];
    }
  } else {
    for (int64_t i = 0; i < cells; ++i) {
      dst[static_cast<size_t>(i)] = fv[static_cast<size_t>(fmap(i))] *
                                    gv[static_cast<size_t>(gmap(i))];
    }
  }
  return out;
}

template <typename T>
GridFunction<T> add(const GridFunction<T>& f, const GridFunction<T>& g) {
  return combine(f, g, CombineOp::Add);
}

template <typename T>
GridFunction<T> mul(const GridFunction<T>& f, const GridFunction<T>& g) {
  return combine(f, g, CombineOp::Mul);
}

template <typename T>
GridFunction<T> scale(const GridFunction<T>& f, const T& c) {
  GridFunction<T> out = f;
  for (T& v : out.values_mut()) v = v * c;
  return out;
}

template <typename T>
T integral(const GridFunction<T>& f) {
  detail::Accum<T> acc;
  for (const T& v : f.values()) acc.add(v);
  if constexpr (std::is_same_v<T, Rational>) {
    return acc.result() * f.cell_volume();
  } else {
    return acc.result() * f.cell_volume().to_double();
  }
}

// Integral of the cellwise product on the common refinement (fused; the
// product grid is never materialized).
template <typename T>
T inner_product(const GridFunction<T>& f, const GridFunction<T>& g) {
  const ShapeVector m = common_resolution(f.resolution(), g.resolution());
  detail::check_resolution(m);
  detail::CellMap fmap(m, f.resolution());
  detail::CellMap gmap(m, g.resolution());
  const int64_t cells = int64_t{1} << shape_total(m);
  auto fv = f.values();
  auto gv = g.values();
  detail::Accum<T> acc;
  for (int64_t i = 0; i < cells; ++i) {
    acc.add_product(fv[static_cast<size_t>(fmap(i))],
                    gv[static_cast<size_t>(gmap(i))]);
  }
  const Rational vol = Rational::dyadic(static_cast<int>(shape_total(m)));
  if constexpr (std::is_same_v<T, Rational>) {
    return acc.result() * vol;
  } else {
    return acc.result() * vol.to_double();
  }
}

// Exact p-th power of the L^p norm: integral of |f|^p.
template <typename T>
T norm_lp_pow(const GridFunction<T>& f, int p) {
  if (p < 1) throw std::invalid_argument("norm_lp: need p >= 1");
  detail::Accum<T> acc;
  for (const T& v : f.values()) {
    if constexpr (std::is_same_v<T, Rational>) {
      acc.add(abs(v).pow(static_cast<unsigned>(p)));
    } else {
      acc.add(std::pow(std::fabs(v), p));
    }
  }
  if constexpr (std::is_same_v<T, Rational>) {
    return acc.result() * f.cell_volume();
  } else {
    return acc.result() * f.cell_volume().to_double();
  }
}

// (integral |f|^p)^(1/p); the power is exact in exact mode, the root is a
// floating-point number.
template <typename T>
double norm_lp(const GridFunction<T>& f, int p) {
  const T pw = norm_lp_pow(f, p);
  double base;
  if constexpr (std::is_same_v<T, Rational>) {
    base = pw.to_double();
  } else {
    base = pw;
  }
  return std::pow(base, 1.0 / p);
}

// Exact maximum of |f| over all cells.
template <typename T>
T norm_inf(const GridFunction<T>& f) {
  T best{};
  for (const T& v : f.values()) {
    T a = detail::abs_value(v);
    if (best < a) best = a;
  }
  return best;
}

template <typename T>
T min_value(const GridFunction<T>& f) {
  auto vals = f.values();
  T best = vals.front();
  for (const T& v : vals) {
    if (v < best) best = v;
  }
  return best;
}

template <typename T>
T max_value(const GridFunction<T>& f) {
  auto vals = f.values();
  T best = vals.front();
  for (const T& v : vals) {
    if (best < v) best = v;
  }
  return best;
}

// Lebesgue measure of { f < 0 } (exact: a count of cells times cell volume).
template <typename T>
Rational negative_measure(const GridFunction<T>& f) {
  int64_t count = 0;
  for (const T& v : f.values()) {
    if (v < T{}) ++count;
  }
  return Rational(count) * f.cell_volume();
}

// Value on the cell containing the point (all cells are half-open).
template <typename T>
const T& value_at_point(const GridFunction<T>& f,
                        std::span<const Rational> x) {
  if (static_cast<int>(x.size()) != f.dim()) {
    throw std::invalid_argument("grid: dimension mismatch");
  }
  int64_t lin = 0;
  for (int t = 0; t < f.dim(); ++t) {
    if (x[t].sign() < 0 || x[t] >= Rational(1)) {
      throw std::domain_error("grid: point outside [0,1)^d");
    }
    const Rational scaled = x[t] * Rational(int64_t{1} << f.resolution()[t]);
    const int64_t j = scaled.num() / scaled.den();  // floor for nonnegative
    lin = (lin << f.resolution()[t]) | j;
  }
  return f.at(lin);
}

// Per-axis table of the 1-d Haar values of interval I on a level-m axis grid.
namespace detail {
inline std::vector<int8_t> haar_axis_table(const DyadicInterval& I, int m) {
  if (m < I.level + 1) {
    throw std::invalid_argument(
        "grid_from_haar: resolution does not resolve the half-split");
  }
  std::vector<int8_t> table(size_t{1} << m, 0);
  const int64_t first = I.pos << (m - I.level);
  const int64_t half = int64_t{1} << (m - I.level - 1);
  std::fill(table.begin() + first, table.begin() + first + half, int8_t{-1});
  std::fill(table.begin() + first + half, table.begin() + first + 2 * half,
            int8_t{1});
  return table;
}
}  // namespace detail

// Grid representation of the tensor Haar function of R at resolution m.
template <typename T>
GridFunction<T> grid_from_haar(const DyadicRectangle& R, const ShapeVector& m) {
  if (static_cast<size_t>(R.dim()) != m.size()) {
    throw std::invalid_argument("grid_from_haar: dimension mismatch");
  }
  detail::check_resolution(m);
  const int d = R.dim();
  std::vector<std::vector<int8_t>> axis(d);
  for (int t = 0; t < d; ++t) {
    axis[t] = detail::haar_axis_table(R.sides[t], m[t]);
  }
  GridFunction<T> out(m, T{});
  auto dst = out.values_mut();
  // Recursive block fill: zero factors skip whole blocks, so the cost is
  // proportional to the support size plus the number of skipped blocks.
  auto fill = [&](auto&& self, int t, size_t base, size_t block,
                  int sign) -> void {
    block >>= m[t];
    for (size_t j = 0; j < axis[t].size(); ++j) {
      const int v = axis[t][j];
      if (v == 0) continue;
      const size_t off = base + j * block;
      if (t == d - 1) {
        dst[off] = T(v * sign);
      } else {
        self(self, t + 1, off, block, v * sign);
      }
    }
  };
  fill(fill, 0, 0, static_cast<size_t>(out.size()), 1);
  return out;
}

}  // namespace hyperhaar
