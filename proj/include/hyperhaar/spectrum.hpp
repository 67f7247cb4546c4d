#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <type_traits>
#include <vector>

#include "hyperhaar/grid.hpp"

namespace hyperhaar {

// Tensor Haar spectrum of a grid function. Basis atoms are tensor products
// taking, per axis, either the constant 1 or a 1-d Haar function; an atom is
// keyed by a DyadicRectangle whose sides are the Haar intervals, with the
// sentinel {level=-1, pos=0} marking a constant axis. The all-constant atom
// is stored separately as `mean`. Coefficients are normalized so that for a
// pure rectangle atom a_R = <f, h_R> / |R|; zero coefficients are omitted.
template <typename T>
struct HaarSpectrum {
  ShapeVector resolution;
  T mean{};
  std::map<DyadicRectangle, T> coeffs;

  T coeff(const DyadicRectangle& R) const {
    auto it = coeffs.find(R);
    return it == coeffs.end() ? T{} : it->second;
  }
};

inline DyadicInterval constant_axis() { return DyadicInterval{-1, 0}; }

namespace detail {

// Applies fn to every axis-aligned line of the array (gathered into a
// contiguous buffer, transformed, scattered back).
template <typename T, typename LineFn>
void for_each_line(std::span<T> data, const ShapeVector& m, int axis,
                   LineFn&& fn) {
  const auto shifts = axis_shifts(m);
  const int64_t stride = int64_t{1} << shifts[axis];
  const int64_t len = int64_t{1} << m[axis];
  const int64_t low = stride;                       // combinations below axis
  const int64_t total = int64_t{1} << shape_total(m);
  const int64_t high = total / (len * low);         // combinations above axis
  std::vector<T> buf(static_cast<size_t>(len));
  for (int64_t hi = 0; hi < high; ++hi) {
    for (int64_t lo = 0; lo < low; ++lo) {
      const int64_t base = hi * len * low + lo;
      for (int64_t j = 0; j < len; ++j) {
        buf[static_cast<size_t>(j)] = data[static_cast<size_t>(base + j * stride)];
      }
      fn(buf);
      for (int64_t j = 0; j < len; ++j) {
        data[static_cast<size_t>(base + j * stride)] = buf[static_cast<size_t>(j)];
      }
    }
  }
}

template <typename T>
T half_of(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v * Rational(1, 2);
  } else {
    return v * 0.5;
  }
}

// In-place 1-d analysis into slot layout: buf[0] = mean,
// buf[2^k + j] = coefficient of h at (level k, pos j).
template <typename T>
void line_analyze(std::vector<T>& buf) {
  const size_t L = buf.size();
  std::vector<T> tmp(L);
  for (size_t len = L; len > 1; len /= 2) {
    const size_t half = len / 2;
    for (size_t j = 0; j < half; ++j) {
      const T& vL = buf[2 * j];
      const T& vR = buf[2 * j + 1];
      tmp[j] = half_of(vL + vR);
      tmp[half + j] = half_of(vR - vL);
    }
    std::copy(tmp.begin(), tmp.begin() + len, buf.begin());
  }
}

template <typename T>
void line_synthesize(std::vector<T>& buf) {
  const size_t L = buf.size();
  std::vector<T> tmp(L);
  for (size_t len = 2; len <= L; len *= 2) {
    const size_t half = len / 2;
    for (size_t j = 0; j < half; ++j) {
      tmp[2 * j] = buf[j] - buf[half + j];
      tmp[2 * j + 1] = buf[j] + buf[half + j];
    }
    std::copy(tmp.begin(), tmp.begin() + len, buf.begin());
  }
}

// Unnormalized integer analysis (sums/differences, no halving):
// slot(k,j) = sum over cells of value * h_{k,j}(cell), slot 0 = plain sum.
// The normalized coefficient of a pure atom follows as slot * 2^(|r| - |m|).
inline void line_analyze_unnormalized(std::vector<int64_t>& buf) {
  const size_t L = buf.size();
  std::vector<int64_t> tmp(L);
  for (size_t len = L; len > 1; len /= 2) {
    const size_t half = len / 2;
    for (size_t j = 0; j < half; ++j) {
      const int64_t vL = buf[2 * j];
      const int64_t vR = buf[2 * j + 1];
      tmp[j] = vL + vR;
      tmp[half + j] = vR - vL;
    }
    std::copy(tmp.begin(), tmp.begin() + len, buf.begin());
  }
}

inline void haar_transform_unnormalized(std::vector<int64_t>& data,
                                        const ShapeVector& m) {
  std::span<int64_t> view(data);
  for (int axis = 0; axis < static_cast<int>(m.size()); ++axis) {
    for_each_line(view, m, axis,
                  [](std::vector<int64_t>& buf) { line_analyze_unnormalized(buf); });
  }
}

// Slot index of (level, pos) in the line layout; level -1 is the constant.
inline int64_t slot_of(int32_t level, int64_t pos) {
  return level < 0 ? 0 : (int64_t{1} << level) + pos;
}

inline DyadicInterval interval_of_slot(int64_t slot) {
  if (slot == 0) return constant_axis();
  int32_t level = 0;
  while ((int64_t{2} << level) <= slot) ++level;
  return DyadicInterval{level, slot - (int64_t{1} << level)};
}

}  // namespace detail

template <typename T>
HaarSpectrum<T> haar_analyze(const GridFunction<T>& f) {
  std::vector<T> data(f.values().begin(), f.values().end());
  std::span<T> view(data);
  const ShapeVector& m = f.resolution();
  const int d = f.dim();
  for (int axis = 0; axis < d; ++axis) {
    detail::for_each_line(view, m, axis,
                          [](std::vector<T>& buf) { detail::line_analyze(buf); });
  }
  HaarSpectrum<T> out;
  out.resolution = m;
  out.mean = data[0];
  const auto shifts = detail::axis_shifts(m);
  const int64_t total = f.size();
  for (int64_t lin = 1; lin < total; ++lin) {
    const T& v = data[static_cast<size_t>(lin)];
    if (v == T{}) continue;
    DyadicRectangle R;
    R.sides.resize(d);
    for (int t = 0; t < d; ++t) {
      const int64_t slot = (lin >> shifts[t]) & ((int64_t{1} << m[t]) - 1);
      R.sides[t] = detail::interval_of_slot(slot);
    }
    out.coeffs.emplace(std::move(R), v);
  }
  return out;
}

template <typename T>
GridFunction<T> haar_synthesize(const HaarSpectrum<T>& s, const ShapeVector& m) {
  detail::check_resolution(m);
  const int d = static_cast<int>(m.size());
  GridFunction<T> out(m, T{});
  auto data = out.values_mut();
  const auto shifts = detail::axis_shifts(m);
  data[0] = s.mean;
  for (const auto& [R, v] : s.coeffs) {
    if (R.dim() != d) {
      throw std::invalid_argument("haar_synthesize: dimension mismatch");
    }
    int64_t lin = 0;
    for (int t = 0; t < d; ++t) {
      const DyadicInterval& I = R.sides[t];
      if (I.level >= m[t]) {
        throw std::invalid_argument(
            "haar_synthesize: resolution does not cover coefficient levels");
      }
      lin |= detail::slot_of(I.level, I.pos) << shifts[t];
    }
    data[static_cast<size_t>(lin)] = v;
  }
  for (int axis = 0; axis < d; ++axis) {
    detail::for_each_line(data, m, axis,
                          [](std::vector<T>& buf) { detail::line_synthesize(buf); });
  }
  return out;
}

// One-axis square function: with f = c(y) + sum_I a_I(y) h_I(x_axis) along
// the chosen axis, returns sum_I a_I(y)^2 1_I(x_axis) on the same grid.
template <typename T>
GridFunction<T> square_function_sq(const GridFunction<T>& f, int axis) {
  if (axis < 0 || axis >= f.dim()) {
    throw std::invalid_argument("square_function_sq: axis out of range");
  }
  GridFunction<T> out = f;
  const int mt = f.resolution()[axis];
  detail::for_each_line(
      out.values_mut(), f.resolution(), axis, [&](std::vector<T>& buf) {
        std::vector<T> slots = buf;
        detail::line_analyze(slots);
        const int64_t L = static_cast<int64_t>(buf.size());
        for (int64_t x = 0; x < L; ++x) {
          T acc{};
          for (int k = 0; k < mt; ++k) {
            const int64_t slot = (int64_t{1} << k) + (x >> (mt - k));
            const T& a = slots[static_cast<size_t>(slot)];
            acc = acc + a * a;
          }
          buf[static_cast<size_t>(x)] = acc;
        }
      });
  return out;
}

// All Haar coefficients a_R of f over rectangles with total level n (pure
// atoms, no constant axes). Shapes the grid cannot resolve have coefficient
// zero and are omitted.
template <typename T>
std::map<DyadicRectangle, T> layer_rect_coefficients(const GridFunction<T>& f,
                                                     int n) {
  std::vector<T> data(f.values().begin(), f.values().end());
  std::span<T> view(data);
  const ShapeVector& m = f.resolution();
  const int d = f.dim();
  for (int axis = 0; axis < d; ++axis) {
    detail::for_each_line(view, m, axis,
                          [](std::vector<T>& buf) { detail::line_analyze(buf); });
  }
  const auto shifts = detail::axis_shifts(m);
  std::map<DyadicRectangle, T> out;
  for (const ShapeVector& r : enumerate_shapes(n, d)) {
    bool resolvable = true;
    for (int t = 0; t < d; ++t) {
      if (r[t] >= m[t]) {
        resolvable = false;
        break;
      }
    }
    if (!resolvable) continue;
    DyadicRectangle R;
    R.sides.resize(d);
    for (int t = 0; t < d; ++t) R.sides[t].level = r[t];
    // Walk all 2^n position combinations of this shape.
    auto rec = [&](auto&& self, int t, int64_t lin) -> void {
      if (t == d) {
        const T& v = data[static_cast<size_t>(lin)];
        if (!(v == T{})) out.emplace(R, v);
        return;
      }
      const int64_t npos = int64_t{1} << r[t];
      for (int64_t j = 0; j < npos; ++j) {
        R.sides[t].pos = j;
        self(self, t + 1,
             lin | (detail::slot_of(r[t], j) << shifts[t]));
      }
    };
    rec(rec, 0, 0);
  }
  return out;
}

}  // namespace hyperhaar
