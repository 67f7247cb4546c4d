#include <doctest.h>

#include <array>
#include <random>

#include "hyperhaar/grid.hpp"

using namespace hyperhaar;

namespace {

DyadicRectangle rect(std::initializer_list<std::pair<int32_t, int64_t>> sides) {
  DyadicRectangle R;
  for (auto [k, j] : sides) R.sides.push_back(DyadicInterval{k, j});
  return R;
}

ExactGrid random_grid(const ShapeVector& m, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-64, 64);
  ExactGrid f(m, Rational(0));
  for (auto& v : f.values_mut()) v = Rational(num(rng), 64);
  return f;
}

}  // namespace

TEST_CASE("grid_from_haar produces the expected cell patterns") {
  const auto f1 = grid_from_haar<Rational>(rect({{0, 0}}), {1});
  CHECK(f1.values()[0] == Rational(-1));
  CHECK(f1.values()[1] == Rational(1));

  const auto f2 = grid_from_haar<Rational>(rect({{0, 0}, {0, 0}}), {1, 1});
  CHECK(f2.values()[0] == Rational(1));
  CHECK(f2.values()[1] == Rational(-1));
  CHECK(f2.values()[2] == Rational(-1));
  CHECK(f2.values()[3] == Rational(1));

  const auto f3 = grid_from_haar<Rational>(rect({{1, 0}, {0, 0}}), {2, 1});
  for (int64_t i = 0; i < f3.size(); ++i) {
    const int64_t j0 = i >> 1;
    if (j0 >= 2) CHECK(f3.at(i) == Rational(0));
  }
  CHECK(f3.at(0) == Rational(1));   // cell (0,0): both halves low
  CHECK(f3.at(1) == Rational(-1));  // cell (0,1)

  CHECK_THROWS_AS(grid_from_haar<Rational>(rect({{1, 0}}), ShapeVector{1}),
                  std::invalid_argument);
}

TEST_CASE("refinement replicates values and preserves integrals") {
  const ExactGrid f = random_grid({2, 1}, 7);
  const ExactGrid g = refine(f, {3, 2});
  CHECK(g.size() == 32);
  CHECK(integral(f) == integral(g));
  CHECK(norm_inf(f) == norm_inf(g));
  CHECK(norm_lp_pow(f, 3) == norm_lp_pow(g, 3));
  // Spot-check replication: fine cell (5, 2) maps to coarse cell (2, 1).
  CHECK(g.at((5 << 2) | 2) == f.at((2 << 1) | 1));
  CHECK_THROWS_AS(refine(f, ShapeVector{1, 1}), std::invalid_argument);
}

TEST_CASE("combine works on mixed resolutions") {
  const auto h1 = grid_from_haar<Rational>(rect({{0, 0}}), {1});
  const auto h2 = grid_from_haar<Rational>(rect({{1, 0}}), {2});
  // h * h = indicator of the support.
  const ExactGrid sq = mul(h1, h1);
  for (const auto& v : sq.values()) CHECK(v == Rational(1));
  // h_[0,1) * h_[0,1/2) = -h_[0,1/2).
  const ExactGrid prod = mul(h1, h2);
  CHECK(prod.resolution() == ShapeVector{2});
  CHECK(prod == scale(h2, Rational(-1)));
  // f + 0 = f.
  const ExactGrid zero(ShapeVector{1}, Rational(0));
  CHECK(add(h2, zero) == h2);
  // Addition refines both operands.
  const ExactGrid s = add(h1, h2);
  CHECK(s.values()[0] == Rational(-2));  // -1 + -1 on [0,1/4)
  CHECK(s.values()[1] == Rational(0));   // -1 + 1 on [1/4,1/2)
  CHECK(s.values()[2] == Rational(1));
  CHECK(s.values()[3] == Rational(1));
}

TEST_CASE("integral and inner products are exact") {
  const auto h = grid_from_haar<Rational>(rect({{1, 1}, {2, 0}}), {2, 3});
  CHECK(integral(h) == Rational(0));
  CHECK(inner_product(h, h) == Rational(1, 8));  // |R| = 2^-3
  const auto g = grid_from_haar<Rational>(rect({{1, 0}, {2, 0}}), {2, 3});
  CHECK(inner_product(h, g) == Rational(0));
  // Distinct rectangles are orthogonal, exhaustively up to level 2 per axis.
  std::vector<DyadicRectangle> all;
  for (int k0 = 0; k0 <= 2; ++k0) {
    for (int k1 = 0; k1 <= 2; ++k1) {
      for (int64_t j0 = 0; j0 < (1 << k0); ++j0) {
        for (int64_t j1 = 0; j1 < (1 << k1); ++j1) {
          all.push_back(rect({{k0, j0}, {k1, j1}}));
        }
      }
    }
  }
  const ShapeVector m{3, 3};
  for (size_t a = 0; a < all.size(); ++a) {
    for (size_t b = a + 1; b < all.size(); ++b) {
      const auto fa = grid_from_haar<Rational>(all[a], m);
      const auto fb = grid_from_haar<Rational>(all[b], m);
      CHECK(inner_product(fa, fb) == Rational(0));
    }
  }
}

TEST_CASE("norms: exact powers, float roots, sup") {
  const auto h = grid_from_haar<Rational>(rect({{2, 1}}), {3});
  CHECK(norm_lp_pow(h, 2) == Rational(1, 4));
  CHECK(norm_inf(h) == Rational(1));
  CHECK(norm_lp(h, 2) == doctest::Approx(0.5).epsilon(1e-12));
  // Parseval for a combination of distinct rectangles.
  ExactGrid f(ShapeVector{3}, Rational(0));
  f = add(scale(grid_from_haar<Rational>(rect({{0, 0}}), {3}), Rational(3, 2)),
          scale(grid_from_haar<Rational>(rect({{2, 3}}), {3}), Rational(-5, 4)));
  CHECK(norm_lp_pow(f, 2) ==
        Rational(9, 4) * Rational(1) + Rational(25, 16) * Rational(1, 4));
}

TEST_CASE("lp norms are nondecreasing in p on a probability space") {
  for (uint64_t seed : {11u, 12u, 13u}) {
    const ExactGrid f = random_grid({2, 2}, seed);
    double prev = norm_lp(f, 1);
    for (int p : {2, 4, 6}) {
      const double cur = norm_lp(f, p);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    CHECK(norm_inf(f).to_double() >= prev - 1e-12);
  }
}

TEST_CASE("min, max, negative measure, and point lookup") {
  ExactGrid f(ShapeVector{1, 1}, Rational(0));
  f.at(0) = Rational(-3, 2);
  f.at(1) = Rational(1, 2);
  f.at(2) = Rational(0);
  f.at(3) = Rational(7);
  CHECK(min_value(f) == Rational(-3, 2));
  CHECK(max_value(f) == Rational(7));
  CHECK(negative_measure(f) == Rational(1, 4));
  CHECK(norm_inf(f) == Rational(7));
  const std::array<Rational, 2> p{Rational(1, 4), Rational(3, 4)};
  CHECK(value_at_point(f, p) == Rational(1, 2));
  const std::array<Rational, 2> origin{Rational(0), Rational(0)};
  CHECK(value_at_point(f, origin) == Rational(-3, 2));
}

TEST_CASE("capacity limit is enforced") {
  CHECK_THROWS_AS(ExactGrid(ShapeVector{27}, Rational(0)), CapacityError);
  CHECK_THROWS_AS(ExactGrid(ShapeVector{14, 14}, Rational(0)), CapacityError);
}

TEST_CASE("float grids mirror the exact interface") {
  FloatGrid f(ShapeVector{2}, 0.0);
  f.at(0) = 0.5;
  f.at(1) = -0.25;
  f.at(2) = 1.0;
  f.at(3) = 0.0;
  CHECK(integral(f) == doctest::Approx(0.3125));
  CHECK(norm_inf(f) == doctest::Approx(1.0));
  CHECK(norm_lp(f, 2) ==
        doctest::Approx(std::sqrt((0.25 + 0.0625 + 1.0) / 4.0)));
}
