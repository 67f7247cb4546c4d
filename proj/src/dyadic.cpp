#include "hyperhaar/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace hyperhaar {

int haar_eval(const DyadicInterval& I, const Rational& x) {
  if (x.sign() < 0 || x >= Rational(1)) {
    throw std::domain_error("haar_eval: point outside [0,1)");
  }
  // x is in I  iff  pos <= x * 2^level < pos + 1.
  const Rational scaled = x * Rational(int64_t{1} << I.level);
  if (scaled < Rational(I.pos) || scaled >= Rational(I.pos + 1)) return 0;
  // Left half: scaled < pos + 1/2.
  return scaled * Rational(2) < Rational(2 * I.pos + 1) ? -1 : 1;
}

int haar_tensor_eval(const DyadicRectangle& R, std::span<const Rational> x) {
  if (static_cast<size_t>(R.dim()) != x.size()) {
    throw std::invalid_argument("haar_tensor_eval: dimension mismatch");
  }
  int prod = 1;
  for (int t = 0; t < R.dim(); ++t) {
    const int v = haar_eval(R.sides[t], x[t]);
    if (v == 0) return 0;
    prod *= v;
  }
  return prod;
}

std::vector<ShapeVector> enumerate_shapes(int n, int d) {
  if (n < 0 || d < 1) {
    throw std::invalid_argument("enumerate_shapes: need n >= 0, d >= 1");
  }
  std::vector<ShapeVector> out;
  ShapeVector cur(d, 0);
  // Recursive lexicographic walk over compositions of n into d parts.
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == d - 1) {
      cur[axis] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[axis] = v;
      self(self, axis + 1, remaining - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

std::vector<DyadicRectangle> rectangles_of_shape(const ShapeVector& r) {
  const int d = static_cast<int>(r.size());
  if (d < 1) throw std::invalid_argument("rectangles_of_shape: empty shape");
  int64_t total = 0;
  for (int32_t k : r) {
    if (k < 0) throw std::invalid_argument("rectangles_of_shape: negative level");
    total += k;
  }
  if (total > 30) {
    throw BudgetError("rectangles_of_shape: 2^" + std::to_string(total) +
                      " rectangles exceeds enumeration budget");
  }
  const int64_t count = int64_t{1} << total;
  std::vector<DyadicRectangle> out;
  out.reserve(static_cast<size_t>(count));
  DyadicRectangle R;
  R.sides.resize(d);
  for (int t = 0; t < d; ++t) R.sides[t].level = r[t];
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == d) {
      out.push_back(R);
      return;
    }
    const int64_t slots = int64_t{1} << r[axis];
    for (int64_t j = 0; j < slots; ++j) {
      R.sides[axis].pos = j;
      self(self, axis + 1);
    }
  };
  rec(rec, 0);
  return out;
}

bool strongly_distinct(std::span<const ShapeVector> vecs) {
  if (vecs.empty()) return true;
  const size_t d = vecs.front().size();
  for (const auto& v : vecs) {
    if (v.size() != d) {
      throw std::invalid_argument("strongly_distinct: dimension mismatch");
    }
  }
  for (size_t t = 0; t < d; ++t) {
    for (size_t a = 0; a < vecs.size(); ++a) {
      for (size_t b = a + 1; b < vecs.size(); ++b) {
        if (vecs[a][t] == vecs[b][t]) return false;
      }
    }
  }
  return true;
}

HaarProduct multiply_haars(std::span<const DyadicRectangle> rects) {
  if (rects.empty()) {
    throw std::invalid_argument("multiply_haars: empty family");
  }
  const int d = rects.front().dim();
  for (const auto& R : rects) {
    if (R.dim() != d) {
      throw std::invalid_argument("multiply_haars: dimension mismatch");
    }
  }
  // Shared sides are a structural precondition violation; they are checked
  // in every coordinate before the disjointness shortcut may return.
  for (int t = 0; t < d; ++t) {
    for (size_t a = 0; a < rects.size(); ++a) {
      for (size_t b = a + 1; b < rects.size(); ++b) {
        if (rects[a].sides[t] == rects[b].sides[t]) {
          throw CoincidenceError("multiply_haars: coordinate " +
                                 std::to_string(t + 1) +
                                 " has a repeated side");
        }
      }
    }
  }
  HaarProduct result;
  result.support.sides.resize(d);
  result.mean_zero = false;
  for (int t = 0; t < d; ++t) {
    // Minimal (finest) side in this coordinate.
    size_t min_idx = 0;
    for (size_t a = 1; a < rects.size(); ++a) {
      if (rects[a].sides[t].level > rects[min_idx].sides[t].level) min_idx = a;
    }
    const DyadicInterval& S_t = rects[min_idx].sides[t];
    bool min_unique = true;
    for (size_t a = 0; a < rects.size(); ++a) {
      if (a == min_idx) continue;
      const DyadicInterval& I = rects[a].sides[t];
      if (I.level == S_t.level) min_unique = false;
      if (!I.contains(S_t)) {
        result.disjoint = true;
        return result;
      }
    }
    result.support.sides[t] = S_t;
    if (min_unique) result.mean_zero = true;
    // Every strictly coarser factor is constant (+/-1) on S_t; fold its value
    // into the sign.  The minimal factor itself contributes h_{S_t}.
    for (size_t a = 0; a < rects.size(); ++a) {
      if (a == min_idx) continue;
      result.sign *= rects[a].sides[t].haar_on(S_t);
    }
  }
  return result;
}

namespace {

int64_t parse_int64(std::string_view s) {
  int64_t value = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("parse_rectangle: bad integer '" +
                                std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string format_rectangle(const DyadicRectangle& R) {
  std::string out;
  for (int t = 0; t < R.dim(); ++t) {
    if (t) out += ',';
    out += std::to_string(R.sides[t].level);
    out += ':';
    out += std::to_string(R.sides[t].pos);
  }
  return out;
}

DyadicRectangle parse_rectangle(std::string_view text) {
  DyadicRectangle R;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    const size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("parse_rectangle: missing ':' in '" +
                                  std::string(item) + "'");
    }
    DyadicInterval I;
    const int64_t level = parse_int64(item.substr(0, colon));
    if (level < 0 || level > 62) {
      throw std::invalid_argument("parse_rectangle: level out of range");
    }
    I.level = static_cast<int32_t>(level);
    I.pos = parse_int64(item.substr(colon + 1));
    if (I.pos < 0 || I.pos >= (int64_t{1} << I.level)) {
      throw std::invalid_argument("parse_rectangle: position out of range");
    }
    R.sides.push_back(I);
    start = comma + 1;
  }
  if (R.sides.empty()) {
    throw std::invalid_argument("parse_rectangle: empty text");
  }
  return R;
}

}  // namespace hyperhaar
