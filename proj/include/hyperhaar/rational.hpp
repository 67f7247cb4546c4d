#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hyperhaar/errors.hpp"

namespace hyperhaar {

namespace detail {

using int128 = __int128;

constexpr int128 kInt64Max = std::numeric_limits<int64_t>::max();

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

// Exact rational scalar: int64 numerator / positive int64 denominator, always
// reduced.  All intermediates use 128-bit arithmetic; results that do not fit
// back into 64/64 throw OverflowError rather than losing exactness.  16 bytes,
// value semantics, no heap — sized so dense grids of tens of millions of cells
// stay affordable.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(int64_t num, int64_t den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    *this = from_int128(num, den);
  }

  static Rational from_int128(detail::int128 num, detail::int128 den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    if (num == 0) return Rational();
    detail::int128 g = detail::gcd128(num, den);
    num /= g;
    den /= g;
    if (detail::abs128(num) > detail::kInt64Max || den > detail::kInt64Max) {
      throw OverflowError("rational does not fit 64-bit num/den");
    }
    Rational r;
    r.num_ = static_cast<int64_t>(num);
    r.den_ = static_cast<int64_t>(den);
    return r;
  }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_int128(
        static_cast<detail::int128>(a.num_) * b.den_ +
            static_cast<detail::int128>(b.num_) * a.den_,
        static_cast<detail::int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_int128(
        static_cast<detail::int128>(a.num_) * b.den_ -
            static_cast<detail::int128>(b.num_) * a.den_,
        static_cast<detail::int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_int128(static_cast<detail::int128>(a.num_) * b.num_,
                       static_cast<detail::int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_int128(static_cast<detail::int128>(a.num_) * b.den_,
                       static_cast<detail::int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<detail::int128>(a.num_) * b.den_ <
           static_cast<detail::int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  Rational pow(unsigned e) const {
    Rational r(1);
    for (unsigned i = 0; i < e; ++i) r *= *this;
    return r;
  }

  // 1 / 2^k as an exact rational (k <= 62).
  static Rational dyadic(int k) {
    if (k < 0 || k > 62) throw OverflowError("dyadic exponent out of range");
    Rational r;
    r.num_ = 1;
    r.den_ = int64_t{1} << k;
    return r;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

  // Parses "p" or "p/q".
  static Rational parse(std::string_view text) {
    auto pos = text.find('/');
    if (pos == std::string_view::npos) {
      return Rational(parse_int(text));
    }
    return Rational(parse_int(text.substr(0, pos)),
                    parse_int(text.substr(pos + 1)));
  }

 private:
  static int64_t parse_int(std::string_view s) {
    int64_t value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) {
      throw OverflowError("rational parse: integer out of 64-bit range");
    }
    if (ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("rational parse: bad integer '" +
                                  std::string(s) + "'");
    }
    return value;
  }

  int64_t num_ = 0;
  int64_t den_ = 1;
};

inline Rational abs(const Rational& v) { return v.abs(); }

namespace detail {

// Wide accumulator for reduction loops (integrals, inner products, p-th power
// sums).  Keeps a 128-bit num/den pair, reduces lazily, and narrows to
// Rational at the end.  The same-denominator fast path covers the hot loops:
// grid values produced by one computation share small denominators.
class Rat128 {
 public:
  Rat128() = default;
  explicit Rat128(const Rational& r) : num_(r.num()), den_(r.den()) {}

  void add(const Rational& r) { add_raw(r.num(), r.den()); }

  void add_product(const Rational& a, const Rational& b) {
    add_raw(static_cast<int128>(a.num()) * b.num(),
            static_cast<int128>(a.den()) * b.den());
  }

  void add_raw(int128 rnum, int128 rden) {
    if (rnum == 0) return;
    if (rden == den_) {
      int128 out;
      if (__builtin_add_overflow(num_, rnum, &out)) {
        reduce();
        if (__builtin_add_overflow(num_, rnum, &out)) {
          throw OverflowError("accumulator sum exceeds 128-bit range");
        }
      }
      num_ = out;
      return;
    }
    // num/den + rnum/rden = (num*rden + rnum*den) / (den*rden)
    int128 t1, t2, nden;
    if (__builtin_mul_overflow(num_, rden, &t1) ||
        __builtin_mul_overflow(rnum, den_, &t2) ||
        __builtin_add_overflow(t1, t2, &t1) ||
        __builtin_mul_overflow(den_, rden, &nden)) {
      reduce();
      int128 g = gcd128(den_, rden);
      int128 rden_r = rden / g;
      if (__builtin_mul_overflow(num_, rden_r, &t1) ||
          __builtin_mul_overflow(rnum, den_ / g, &t2) ||
          __builtin_add_overflow(t1, t2, &t1) ||
          __builtin_mul_overflow(den_, rden_r, &nden)) {
        throw OverflowError("accumulator sum exceeds 128-bit range");
      }
    }
    num_ = t1;
    den_ = nden;
  }

  void reduce() {
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    int128 g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  Rational to_rational() {
    reduce();
    return Rational::from_int128(num_, den_);
  }

  double to_double() {
    reduce();
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

 private:
  int128 num_ = 0;
  int128 den_ = 1;
};

}  // namespace detail
}  // namespace hyperhaar
