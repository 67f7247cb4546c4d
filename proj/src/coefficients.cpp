#include "hyperhaar/coefficients.hpp"

#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace hyperhaar {

CoefficientField::CoefficientField(int n, int d) : n_(n), d_(d) {
  if (n < 0 || d < 1) {
    throw std::invalid_argument("CoefficientField: need n >= 0, d >= 1");
  }
}

void CoefficientField::set(const DyadicRectangle& R, const Rational& value) {
  if (R.dim() != d_) {
    throw std::invalid_argument("CoefficientField: dimension mismatch");
  }
  for (const auto& I : R.sides) {
    if (I.level < 0 || I.pos < 0 || I.pos >= (int64_t{1} << I.level)) {
      throw std::invalid_argument("CoefficientField: malformed rectangle");
    }
  }
  const int64_t total = R.total_level();
  auto& target = total == n_ ? layer_ : coarse_;
  if (total > n_) {
    throw std::invalid_argument(
        "CoefficientField: rectangle finer than the layer volume");
  }
  if (value.is_zero()) {
    target.erase(R);
  } else {
    target[R] = value;
  }
}

Rational CoefficientField::alpha(const DyadicRectangle& R) const {
  const auto& source = R.total_level() == n_ ? layer_ : coarse_;
  auto it = source.find(R);
  return it == source.end() ? Rational(0) : it->second;
}

Rational CoefficientField::layer_abs_sum() const {
  detail::Rat128 acc;
  for (const auto& [R, a] : layer_) acc.add(abs(a));
  return acc.to_rational();
}

Rational CoefficientField::layer_abs_sum_if(
    const std::function<bool(const ShapeVector&)>& keep) const {
  detail::Rat128 acc;
  for (const auto& [R, a] : layer_) {
    if (keep(R.shape())) acc.add(abs(a));
  }
  return acc.to_rational();
}

Rational CoefficientField::l2_sq() const {
  detail::Rat128 acc;
  for (const auto& [R, a] : layer_) acc.add(a * a * R.volume());
  for (const auto& [R, a] : coarse_) acc.add(a * a * R.volume());
  return acc.to_rational();
}

Rational CoefficientField::max_abs() const {
  Rational best(0);
  for (const auto& [R, a] : layer_) best = std::max(best, abs(a));
  for (const auto& [R, a] : coarse_) best = std::max(best, abs(a));
  return best;
}

CoefficientField CoefficientField::scaled(const Rational& c) const {
  CoefficientField out(n_, d_);
  for (const auto& [R, a] : layer_) out.set(R, a * c);
  for (const auto& [R, a] : coarse_) out.set(R, a * c);
  return out;
}

CoefficientField CoefficientField::ones(int n, int d) {
  CoefficientField out(n, d);
  for (const ShapeVector& r : enumerate_shapes(n, d)) {
    for (const DyadicRectangle& R : rectangles_of_shape(r)) {
      out.layer_[R] = Rational(1);
    }
  }
  return out;
}

CoefficientField CoefficientField::random_rational(int n, int d,
                                                   uint64_t seed) {
  CoefficientField out(n, d);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-64, 64);
  for (const ShapeVector& r : enumerate_shapes(n, d)) {
    for (const DyadicRectangle& R : rectangles_of_shape(r)) {
      const Rational a(num(rng), 64);
      if (!a.is_zero()) out.layer_[R] = a;
    }
  }
  return out;
}

CoefficientField CoefficientField::random_signs(int n, int d, uint64_t seed) {
  CoefficientField out(n, d);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  for (const ShapeVector& r : enumerate_shapes(n, d)) {
    for (const DyadicRectangle& R : rectangles_of_shape(r)) {
      out.layer_[R] = Rational(bit(rng) ? 1 : -1);
    }
  }
  return out;
}

CoefficientField CoefficientField::from_csv(std::istream& in, int n, int d) {
  CoefficientField out(n, d);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("coefficient CSV: missing value in '" +
                                  line + "'");
    }
    const DyadicRectangle R = parse_rectangle(
        std::string_view(line).substr(0, comma));
    const Rational value =
        Rational::parse(std::string_view(line).substr(comma + 1));
    out.set(R, value);
  }
  return out;
}

void CoefficientField::write_csv(std::ostream& out) const {
  for (const auto& [R, a] : layer_) {
    out << format_rectangle(R) << ',' << a.str() << '\n';
  }
  for (const auto& [R, a] : coarse_) {
    out << format_rectangle(R) << ',' << a.str() << '\n';
  }
}

}  // namespace hyperhaar
