#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/errors.hpp"
#include "hyperhaar/graphs.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/riesz.hpp"

using namespace hyperhaar;

namespace {

// Canonical text form of a graph's edge structure, for set comparisons.
std::string edge_key(const ColoredGraph& g) {
  std::ostringstream os;
  for (const auto& [color, es] : g.edges) {
    if (es.empty()) continue;
    os << color << ':';
    for (const auto& [v, w] : es) os << v << '-' << w << ';';
  }
  return os.str();
}

bool grid_is_zero(const ExactGrid& g) {
  return max_value(g) == Rational(0) && min_value(g) == Rational(0);
}

TupleSet free_tuple_set(const RieszParams& params,
                        const std::vector<int32_t>& vertices) {
  TupleSet ts;
  ts.d = params.d;
  ts.n = params.n;
  ts.vertices = vertices;
  for (int32_t v : vertices) {
    ts.ranges.push_back(params.blocks[static_cast<size_t>(v - 1)]);
  }
  ts.classes_by_color.assign(static_cast<size_t>(params.d - 1), {});
  return ts;
}

}  // namespace

TEST_CASE("admissibility: cliques, coverage, index") {
  // A single pair joined in one color.
  ColoredGraph pair;
  pair.vertices = {1, 2};
  pair.add_edge(2, 1, 2);
  const auto a = validate_admissible(pair, 3);
  CHECK(a.index == 1);
  CHECK(a.cliques.at(2).size() == 1);
  CHECK(a.cliques.at(2)[0] == std::vector<int32_t>{1, 2});
  CHECK(a.separated_colors);

  // A triangle in one color is a single clique of size 3.
  ColoredGraph tri;
  tri.vertices = {1, 2, 3};
  tri.add_edge(2, 1, 2);
  tri.add_edge(2, 2, 3);
  tri.add_edge(2, 1, 3);
  const auto t = validate_admissible(tri, 3);
  CHECK(t.index == 2);
  CHECK(t.cliques.at(2).size() == 1);

  // Two disjoint pairs in different colors covering four vertices.
  ColoredGraph two;
  two.vertices = {1, 2, 3, 4};
  two.add_edge(2, 1, 2);
  two.add_edge(3, 3, 4);
  const auto w = validate_admissible(two, 3);
  CHECK(w.index == 2);

  // A path is not a disjoint union of cliques.
  ColoredGraph path;
  path.vertices = {1, 2, 3};
  path.add_edge(2, 1, 2);
  path.add_edge(2, 2, 3);
  CHECK_THROWS_AS((void)validate_admissible(path, 3), NotAdmissible);

  // An uncovered vertex is rejected.
  ColoredGraph loose;
  loose.vertices = {1, 2, 3};
  loose.add_edge(2, 1, 2);
  CHECK_THROWS_AS((void)validate_admissible(loose, 3), NotAdmissible);

  // The same pair joined in every color: structurally fine, but the
  // one-clique-per-color intersection has two vertices; recorded as a flag
  // (its tuple set over disjoint blocks is empty).
  ColoredGraph both;
  both.vertices = {1, 2};
  both.add_edge(2, 1, 2);
  both.add_edge(3, 1, 2);
  const auto b = validate_admissible(both, 3);
  CHECK(b.index == 2);
  CHECK_FALSE(b.separated_colors);

  CHECK_THROWS_AS(pair.add_edge(2, 1, 1), std::invalid_argument);
  ColoredGraph bad_color = pair;
  bad_color.edges[5].insert({1, 2});
  CHECK_THROWS_AS((void)validate_admissible(bad_color, 3),
                  std::invalid_argument);
}

TEST_CASE("enumeration counts and brute-force cross-check") {
  CHECK(enumerate_admissible({1}, 3).empty());
  CHECK(enumerate_admissible({1, 2}, 3).size() == 3);
  CHECK(enumerate_admissible({1, 2}, 4).size() == 7);
  CHECK(enumerate_admissible({1, 2, 3}, 3).size() == 15);
  CHECK_THROWS_AS((void)enumerate_admissible({1, 2, 3, 4, 5}, 3),
                  BudgetError);

  // Brute force over every edge assignment on three vertices, two colors.
  const std::array<std::pair<int32_t, int32_t>, 3> all_pairs{
      {{1, 2}, {1, 3}, {2, 3}}};
  std::set<std::string> brute;
  for (uint32_t mask = 0; mask < 64; ++mask) {
    ColoredGraph g;
    g.vertices = {1, 2, 3};
    for (int i = 0; i < 3; ++i) {
      if (mask & (1u << i)) {
        g.add_edge(2, all_pairs[static_cast<size_t>(i)].first,
                   all_pairs[static_cast<size_t>(i)].second);
      }
      if (mask & (1u << (i + 3))) {
        g.add_edge(3, all_pairs[static_cast<size_t>(i)].first,
                   all_pairs[static_cast<size_t>(i)].second);
      }
    }
    try {
      (void)validate_admissible(g, 3);
      brute.insert(edge_key(g));
    } catch (const NotAdmissible&) {
    }
  }
  CHECK(brute.size() == 15);

  std::set<std::string> enumerated;
  for (const auto& a : enumerate_admissible({1, 2, 3}, 3)) {
    enumerated.insert(edge_key(a.graph));
  }
  CHECK(enumerated == brute);

  // Index bounds and revalidation for a spread of vertex sets.
  for (int d : {3, 4}) {
    for (const auto& V :
         std::vector<std::vector<int32_t>>{{1, 2}, {1, 3}, {1, 2, 3}}) {
      for (const auto& a : enumerate_admissible(V, d)) {
        CHECK(a.index >= 1);
        const int vsz = static_cast<int>(V.size());
        CHECK(a.index <= (d - 1) * (vsz - 1) * vsz / 2);
        const auto again = validate_admissible(a.graph, d);
        CHECK(again.index == a.index);
      }
    }
  }
}

TEST_CASE("sumprod: single vertex, empty set, oracle, factorization") {
  const auto coeffs = CoefficientField::random_rational(4, 3, 41);
  const auto p = derive_params(3, 4, 2, BlockMode::Partition, Rational(1, 4));

  // One free vertex reproduces the block sum.
  CHECK(sumprod(free_tuple_set(p, {1}), coeffs) == block_sum(p, 1, coeffs));
  CHECK(sumprod(free_tuple_set(p, {2}), coeffs) == block_sum(p, 2, coeffs));

  // Pair constrained in every color: the tuple set is empty over disjoint
  // blocks, and the sum is the zero function.
  ColoredGraph both;
  both.vertices = {1, 2};
  both.add_edge(2, 1, 2);
  both.add_edge(3, 1, 2);
  const auto empty_sum =
      sumprod(tuple_set(validate_admissible(both, 3), p), coeffs);
  CHECK(grid_is_zero(empty_sum));

  // One color-2 edge: direct enumeration oracle.
  ColoredGraph pairg;
  pairg.vertices = {1, 2};
  pairg.add_edge(2, 1, 2);
  const auto ts = tuple_set(validate_admissible(pairg, 3), p);
  const ExactGrid sp = sumprod(ts, coeffs);
  ExactGrid oracle(ShapeVector{1, 1, 1}, Rational(0));
  int64_t tuples = 0;
  for (const auto& r : block_shapes(p, 1)) {
    for (const auto& s : block_shapes(p, 2)) {
      if (r[1] != s[1]) continue;
      oracle = add(oracle, mul(rfunction(r, coeffs), rfunction(s, coeffs)));
      ++tuples;
    }
  }
  CHECK(tuples > 0);
  const ShapeVector common = common_resolution(sp.resolution(),
                                               oracle.resolution());
  CHECK(refine(sp, common) == refine(oracle, common));

  // Tuples across distinct blocks always have a strict minimum in the first
  // coordinate, so the sum has mean zero.
  CHECK(integral(sp) == Rational(0));

  // Disjoint vertex sets factor exactly.
  const auto coeffs8 = CoefficientField::random_rational(8, 3, 43);
  const auto p8 = derive_params(3, 8, 4, BlockMode::Partition, Rational(1, 4));
  ColoredGraph g1;
  g1.vertices = {1, 2};
  g1.add_edge(2, 1, 2);
  ColoredGraph g2;
  g2.vertices = {3, 4};
  g2.add_edge(3, 3, 4);
  ColoredGraph gu;
  gu.vertices = {1, 2, 3, 4};
  gu.add_edge(2, 1, 2);
  gu.add_edge(3, 3, 4);
  const auto su = sumprod(tuple_set(validate_admissible(gu, 3), p8), coeffs8);
  const auto s1 = sumprod(tuple_set(validate_admissible(g1, 3), p8), coeffs8);
  const auto s2 = sumprod(tuple_set(validate_admissible(g2, 3), p8), coeffs8);
  const auto prod = mul(s1, s2);
  const ShapeVector c2 = common_resolution(su.resolution(), prod.resolution());
  CHECK(refine(su, c2) == refine(prod, c2));
}

TEST_CASE("coincidence sums: empty case, oracle, mean zero, monotonicity") {
  // d = 2: one shape per first-coordinate level, so no valid pair exists.
  const auto ones2 = CoefficientField::ones(4, 2);
  const auto p2 = derive_params(2, 4, 2, BlockMode::Partition, Rational(1, 4));
  CHECK(grid_is_zero(coincidence_sum(1, 1, 1, p2, ones2)));

  // d = 3 oracle: direct pair enumeration.
  const auto coeffs = CoefficientField::random_rational(4, 3, 53);
  const auto p = derive_params(3, 4, 2, BlockMode::Partition, Rational(1, 4));
  const ExactGrid phi = coincidence_sum(1, 1, 1, p, coeffs);
  ExactGrid oracle(ShapeVector{1, 1, 1}, Rational(0));
  for (const auto& r : block_shapes(p, 1)) {
    for (const auto& s : block_shapes(p, 1)) {
      if (r == s || r[0] != s[0]) continue;
      oracle = add(oracle, mul(rfunction(r, coeffs), rfunction(s, coeffs)));
    }
  }
  const ShapeVector common = common_resolution(phi.resolution(),
                                               oracle.resolution());
  CHECK(refine(phi, common) == refine(oracle, common));

  // Every pair differs in the second coordinate (d = 3), so the minimum
  // there is strict and the sum has mean zero; likewise across blocks.
  CHECK(integral(phi) == Rational(0));
  CHECK(integral(coincidence_sum(1, 2, 2, p, coeffs)) == Rational(0));

  // Norm monotonicity, exactly: (int Phi^2)^2 <= int Phi^4 on probability
  // space of total mass one.
  const Rational m2 = norm_lp_pow(phi, 2);
  const Rational m4 = norm_lp_pow(phi, 4);
  CHECK(m2 * m2 <= m4);

  CHECK_THROWS_AS((void)coincidence_sum(1, 1, 4, p, coeffs),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)coincidence_sum(0, 1, 1, p, coeffs),
                  std::invalid_argument);
}

TEST_CASE("coincidence sum second moment matches Monte Carlo within 3 sigma") {
  const auto coeffs = CoefficientField::random_rational(4, 3, 59);
  const auto p = derive_params(3, 4, 2, BlockMode::Partition, Rational(1, 4));
  const ExactGrid phi = coincidence_sum(1, 1, 1, p, coeffs);
  const double exact = norm_lp_pow(phi, 2).to_double();

  // Uniform points hit grid cells uniformly, so sampling cells directly is
  // an honest Monte Carlo draw for a cellwise-constant function.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int64_t> pick(0, phi.size() - 1);
  const int kSamples = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double y = phi.at(pick(rng)).to_double();
    sum += y * y;
    sumsq += y * y * y * y;
  }
  const double mean = sum / kSamples;
  const double var = sumsq / kSamples - mean * mean;
  const double sigma = std::sqrt(var / kSamples);
  CHECK(std::abs(mean - exact) <= 3.0 * sigma);
}

TEST_CASE("inclusion-exclusion rebuilds the remainder exactly") {
  // q = 1: no admissible graph exists and the remainder is zero.
  {
    const auto coeffs = CoefficientField::random_rational(3, 3, 61);
    const auto p =
        derive_params(3, 3, 1, BlockMode::Partition, Rational(1, 4));
    CHECK(inclusion_exclusion_terms(p).empty());
    const auto lhs = inclusion_exclusion_psi_neg(p, coeffs);
    CHECK(lhs == decompose(p, coeffs).neg);
    CHECK(grid_is_zero(lhs));
  }

  // q = 2, d = 3: bitwise identity for both surrogates.
  for (const Rational& s : {Rational(1, 4), Rational(1, 3)}) {
    const auto coeffs = CoefficientField::random_rational(4, 3, 67);
    const auto p = derive_params(3, 4, 2, BlockMode::Partition, s);
    CHECK(inclusion_exclusion_psi_neg(p, coeffs) == decompose(p, coeffs).neg);
  }

  // q = 3, d = 3: the multi-clique terms carry factorial multiplicities;
  // exact equality is sensitive to every one of them.
  {
    const auto coeffs = CoefficientField::random_rational(6, 3, 71);
    const auto p =
        derive_params(3, 6, 3, BlockMode::Partition, Rational(1, 4));
    CHECK(inclusion_exclusion_terms(p).size() == 24);
    CHECK(inclusion_exclusion_psi_neg(p, coeffs) == decompose(p, coeffs).neg);
  }

  // d = 4, q = 2.
  {
    const auto coeffs = CoefficientField::random_rational(4, 4, 73);
    const auto p =
        derive_params(4, 4, 2, BlockMode::Partition, Rational(1, 3));
    CHECK(inclusion_exclusion_psi_neg(p, coeffs) == decompose(p, coeffs).neg);
  }

  // Shifted blocks.
  {
    const auto coeffs = CoefficientField::random_rational(6, 3, 79);
    const auto p = derive_params(3, 6, 3, BlockMode::Shifted, Rational(1, 4));
    CHECK(inclusion_exclusion_psi_neg(p, coeffs) == decompose(p, coeffs).neg);
  }

  CHECK_THROWS_AS(
      (void)inclusion_exclusion_psi_neg(derive_params(3, 4, 2),
                                        CoefficientField::ones(4, 3)),
      std::invalid_argument);
}

TEST_CASE("inclusion-exclusion mutation: contributing terms are load-bearing") {
  const auto coeffs = CoefficientField::random_rational(4, 3, 83);
  const auto p = derive_params(3, 4, 2, BlockMode::Partition, Rational(1, 4));
  const auto neg = decompose(p, coeffs).neg;
  const auto terms = inclusion_exclusion_terms(p);
  CHECK(terms.size() == 3);
  for (size_t i = 0; i < terms.size(); ++i) {
    const auto dropped = inclusion_exclusion_psi_neg(p, coeffs, i);
    const bool contributes =
        !grid_is_zero(sumprod(tuple_set(terms[i].graph, p), coeffs));
    if (contributes) {
      CHECK(dropped != neg);
    } else {
      CHECK(dropped == neg);
    }
  }

  // Spot check at q = 3: dropping the first contributing term breaks it.
  const auto coeffs6 = CoefficientField::random_rational(6, 3, 89);
  const auto p6 = derive_params(3, 6, 3, BlockMode::Partition, Rational(1, 4));
  const auto neg6 = decompose(p6, coeffs6).neg;
  const auto terms6 = inclusion_exclusion_terms(p6);
  for (size_t i = 0; i < terms6.size(); ++i) {
    if (grid_is_zero(sumprod(tuple_set(terms6[i].graph, p6), coeffs6))) {
      continue;
    }
    CHECK(inclusion_exclusion_psi_neg(p6, coeffs6, i) != neg6);
    break;
  }
}

TEST_CASE("growth measurement: exactness, sign independence, ordering") {
  const auto rep = beck_gain_experiment(3, {4, 6, 8}, {2, 4});
  CHECK(rep.measured.points.size() == 6);  // three n values, two moments

  // The collapsed two-axis computation agrees with the full grid, and even
  // moments are invariant across sign fields that factor across axes
  // (eps_R = prod_j u_j(level_j, pos_j)), of which all-plus is one member.
  for (int n : {4, 6}) {
    const auto params = derive_params(3, n, 2);
    const Rational from_ones = norm_lp_pow(
        coincidence_sum(1, 1, 1, params, CoefficientField::ones(n, 3)), 2);
    std::mt19937_64 rng(97);
    std::vector<std::vector<std::vector<int>>> u(3);
    for (int j = 0; j < 3; ++j) {
      u[static_cast<size_t>(j)].resize(static_cast<size_t>(n) + 1);
      for (int k = 0; k <= n; ++k) {
        auto& row = u[static_cast<size_t>(j)][static_cast<size_t>(k)];
        row.resize(size_t{1} << k);
        for (auto& s : row) s = (rng() & 1) ? 1 : -1;
      }
    }
    CoefficientField separable(n, 3);
    for (const auto& r : enumerate_shapes(n, 3)) {
      DyadicRectangle R;
      R.sides.assign(3, {});
      for (int j = 0; j < 3; ++j)R.sides[static_cast<size_t>(j)].level = r[static_cast<size_t>(j)];
      const auto fill = [&](auto&& self, int j) -> void {
        if (j == 3) {
          int sgn = 1;
          for (int t = 0; t < 3; ++t) {
            const auto& side = R.sides[static_cast<size_t>(t)];
            sgn *= u[static_cast<size_t>(t)][static_cast<size_t>(side.level)]
                    [static_cast<size_t>(side.pos)];
          }
          separable.set(R, Rational(sgn));
          return;
        }
        const int64_t cells = int64_t{1} << r[static_cast<size_t>(j)];
        for (int64_t pos = 0; pos < cells; ++pos) {
          R.sides[static_cast<size_t>(j)].pos = pos;
          self(self, j + 1);
        }
      };
      fill(fill, 0);
    }
    const Rational from_separable =
        norm_lp_pow(coincidence_sum(1, 1, 1, params, separable), 2);
    CHECK(from_ones == from_separable);
    for (const auto& pt : rep.measured.points) {
      if (pt.n == n && pt.p == 2) {
        CHECK(from_ones == Rational(std::stoll(pt.moment)));
      }
    }
  }

  for (size_t i = 0; i < rep.ns.size(); ++i) {
    const auto& m2 = rep.measured.points[2 * i];
    const auto& m4 = rep.measured.points[2 * i + 1];
    CHECK(m2.p == 2);
    CHECK(m4.p == 4);
    // ||Phi||_2 <= ||Phi||_4, exactly on the integer moments.
    const int64_t a = std::stoll(m2.moment);
    const int64_t b = std::stoll(m4.moment);
    CHECK(a * a <= b);
    // The pinned variant is strictly smaller, the free variant larger.
    CHECK(rep.pinned.points[i].norm < m2.norm);
    CHECK(m2.norm <= rep.naive.points[i].norm);
  }

  CHECK(rep.measured.l2_slope < rep.naive.l2_slope);
  CHECK(rep.gain_gap > 0.0);
  CHECK(rep.pinned.l2_slope < rep.measured.l2_slope);

  CHECK_THROWS_AS((void)beck_gain_experiment(4, {4, 6}, {2}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)beck_gain_experiment(3, {4}, {2}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)beck_gain_experiment(3, {4, 6}, {3}),
                  std::invalid_argument);
}
