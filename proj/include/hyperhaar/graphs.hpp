#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/riesz.hpp"

namespace hyperhaar {

// A (d-1)-colored graph on block indices.  Colors run over the coordinate
// axes 2..d; an edge of color j between vertices v and w will constrain the
// j-th coordinates of the shapes attached to blocks v and w to coincide.
struct ColoredGraph {
  std::vector<int32_t> vertices;  // strictly increasing, values >= 1
  // color -> set of undirected edges stored as (min, max) pairs.
  std::map<int32_t, std::set<std::pair<int32_t, int32_t>>> edges;

  void add_edge(int32_t color, int32_t v, int32_t w);
};

// A validated graph: every color's edge set is a disjoint union of complete
// components ("cliques", size >= 2) and every vertex lies in at least one.
struct AdmissibleGraph {
  ColoredGraph graph;
  int d = 0;  // number of coordinate axes; colors are 2..d
  // color -> its cliques, each sorted ascending; cliques of one color are
  // pairwise disjoint.
  std::map<int32_t, std::vector<std::vector<int32_t>>> cliques;
  // Sum over all cliques of (size - 1): the number of forced coincidences.
  int index = 0;
  // True iff every choice of one clique per color (over all colors that have
  // one) intersects in at most one vertex.  When false, the corresponding
  // tuple set over disjoint blocks is necessarily empty, so such graphs are
  // kept but contribute nothing.
  bool separated_colors = true;
};

// Checks the admissibility conditions and computes the clique decomposition
// and index.  Throws NotAdmissible naming the violated condition.
AdmissibleGraph validate_admissible(const ColoredGraph& g, int d);

// All admissible graphs whose vertex set is exactly `V` (every listed vertex
// covered by a clique).  Exhaustive; requires |V| <= 4.
std::vector<AdmissibleGraph> enumerate_admissible(const std::vector<int32_t>& V,
                                                  int d);

// The tuple set X(G): one shape per vertex, drawn from that vertex's block,
// with the per-color equality constraints induced by the graph's cliques.
struct TupleSet {
  int d = 0;
  int n = 0;
  std::vector<int32_t> vertices;  // block indices, ascending
  // Per vertex: the [lo, hi] range of its block (first-coordinate levels).
  std::vector<std::pair<int32_t, int32_t>> ranges;
  // classes_by_color[j - 2] partitions vertex *positions* (indices into
  // `vertices`) whose color-j coordinates must agree.  Singleton positions
  // are unconstrained and omitted.
  std::vector<std::vector<std::vector<int32_t>>> classes_by_color;
};

TupleSet tuple_set(const AdmissibleGraph& g, const RieszParams& params);

// Sum over all tuples in X(G) of the product of the tuple's r-functions.
// Exact; enumeration propagates the equality constraints.  Throws BudgetError
// when the unconstrained tuple count exceeds the enumeration budget.
ExactGrid sumprod(const TupleSet& ts, const CoefficientField& coeffs);

// Coincidence sum: over ordered pairs (r, s) from blocks t1 x t2 with
// r != s as vectors but equal k-th coordinate, the sum of f_r * f_s.
ExactGrid coincidence_sum(int t1, int t2, int k, const RieszParams& params,
                          const CoefficientField& coeffs);

// One term of the inclusion-exclusion reconstruction: an admissible graph
// together with its signed multiplicity (-1)^{index+1} * prod (|Q| - 1)!.
struct InExTerm {
  AdmissibleGraph graph;
  int64_t weight = 0;
};

// All terms over vertex subsets of {1..q} of size >= 2, in a fixed
// deterministic order.
std::vector<InExTerm> inclusion_exclusion_terms(const RieszParams& params);

// Reconstructs the non-strongly-distinct remainder of the Riesz product from
// admissible graphs alone: sum over terms of
//   weight * rho~^{|V|} * SumProd(X(G)) * prod_{t not in V} (1 + rho~ F_t),
// equal bitwise to decompose(...).neg.  Exact mode only (rho~ surrogate
// required); q <= 4.  `drop_term` omits one enumerated term (diagnostic for
// mutation testing).
ExactGrid inclusion_exclusion_psi_neg(
    const RieszParams& params, const CoefficientField& coeffs,
    std::optional<size_t> drop_term = std::nullopt);

// One measured moment of a coincidence sum: `moment` is the exact integer
// value of the integral of Phi^p over the unit cube, `norm` its p-th root.
struct BeckGainPoint {
  int n = 0;
  int p = 0;
  std::string moment;  // decimal integer, exact
  double norm = 0.0;
};

struct BeckGainSeries {
  std::vector<BeckGainPoint> points;
  double l2_slope = 0.0;  // least-squares slope of log ||.||_2 vs log n
};

// Growth measurement for the first-coordinate coincidence sum
// Phi = sum_{r != s in A_1 x A_1, r_1 = s_1} f_r f_s  (two-block split):
//   measured: Phi itself, all requested even p;
//   naive:    the same pair sum with the coincidence constraint removed
//             (free parameters), p = 2;
//   pinned:   both middle coordinates fixed (sup over distinct pins), p = 2.
// Even moments of such sums are invariant under any sign field that factors
// across axes (eps_R = prod_j u_j(level_j, pos_j)); the computation uses the
// canonical all-plus signs, which represent that class.
struct BeckGainReport {
  int d = 0;
  std::vector<int> ns;
  std::vector<int> ps;
  BeckGainSeries measured;
  BeckGainSeries naive;
  BeckGainSeries pinned;
  double gain_gap = 0.0;  // naive slope minus measured slope
};

BeckGainReport beck_gain_experiment(int d, const std::vector<int>& n_range,
                                    const std::vector<int>& p_list);

}  // namespace hyperhaar
