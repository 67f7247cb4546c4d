#include <doctest.h>

#include <sstream>

#include "hyperhaar/coefficients.hpp"

using namespace hyperhaar;

namespace {

DyadicRectangle rect(std::initializer_list<std::pair<int32_t, int64_t>> sides) {
  DyadicRectangle R;
  for (auto [k, j] : sides) R.sides.push_back(DyadicInterval{k, j});
  return R;
}

}  // namespace

TEST_CASE("ones fills the whole layer") {
  const auto c = CoefficientField::ones(2, 2);
  CHECK(c.layer().size() == 12);  // 3 shapes x 4 rectangles
  CHECK(c.coarse().empty());
  CHECK(c.layer_abs_sum() == Rational(12));
  CHECK(c.alpha(rect({{1, 0}, {1, 1}})) == Rational(1));
  CHECK(c.sign_of(rect({{1, 0}, {1, 1}})) == 1);
  CHECK(c.l2_sq() == Rational(12) * Rational(1, 4));
}

TEST_CASE("set routes by volume and validates") {
  CoefficientField c(2, 2);
  c.set(rect({{2, 3}, {0, 0}}), Rational(-1, 2));
  c.set(rect({{1, 0}, {0, 0}}), Rational(5));  // coarser than the layer
  CHECK(c.layer().size() == 1);
  CHECK(c.coarse().size() == 1);
  CHECK(c.alpha(rect({{2, 3}, {0, 0}})) == Rational(-1, 2));
  CHECK(c.sign_of(rect({{2, 3}, {0, 0}})) == -1);
  CHECK(c.alpha(rect({{1, 1}, {0, 0}})) == Rational(0));
  CHECK(c.sign_of(rect({{1, 1}, {0, 0}})) == 1);  // sgn(0) = +1
  CHECK_THROWS_AS(c.set(rect({{2, 0}, {1, 0}}), Rational(1)),
                  std::invalid_argument);  // finer than the layer
  CHECK_THROWS_AS(c.set(rect({{1, 2}, {0, 0}}), Rational(1)),
                  std::invalid_argument);  // position out of range
  // Setting zero removes the entry.
  c.set(rect({{2, 3}, {0, 0}}), Rational(0));
  CHECK(c.layer().empty());
}

TEST_CASE("random fields are deterministic in the seed") {
  const auto a = CoefficientField::random_rational(3, 2, 42);
  const auto b = CoefficientField::random_rational(3, 2, 42);
  const auto c = CoefficientField::random_rational(3, 2, 43);
  CHECK(a.layer() == b.layer());
  CHECK(a.layer() != c.layer());
  CHECK(a.max_abs() <= Rational(1));
  const auto s = CoefficientField::random_signs(3, 2, 7);
  CHECK(s.layer().size() == 32);  // 4 shapes x 8 rectangles
  for (const auto& [R, v] : s.layer()) {
    CHECK((v == Rational(1) || v == Rational(-1)));
  }
}

TEST_CASE("scaling multiplies every coefficient") {
  auto c = CoefficientField::ones(1, 2);
  c.set(rect({{0, 0}, {0, 0}}), Rational(4));
  const auto half = c.scaled(Rational(1, 4));
  CHECK(half.alpha(rect({{0, 0}, {0, 0}})) == Rational(1));
  CHECK(half.alpha(rect({{1, 1}, {0, 0}})) == Rational(1, 4));
  CHECK(half.max_abs() == Rational(1));
}

TEST_CASE("csv round trip") {
  CoefficientField c(2, 2);
  c.set(rect({{2, 1}, {0, 0}}), Rational(-3, 4));
  c.set(rect({{1, 1}, {1, 0}}), Rational(2));
  c.set(rect({{0, 0}, {1, 1}}), Rational(1, 2));  // coarse entry
  std::ostringstream out;
  c.write_csv(out);
  std::istringstream in(out.str());
  const auto back = CoefficientField::from_csv(in, 2, 2);
  CHECK(back.layer() == c.layer());
  CHECK(back.coarse() == c.coarse());

  std::istringstream bad("1:0,1:0\n");
  CHECK_THROWS_AS(CoefficientField::from_csv(bad, 2, 2),
                  std::invalid_argument);
}
