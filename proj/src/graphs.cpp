#include "hyperhaar/graphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperhaar/errors.hpp"
#include "riesz_internal.hpp"

namespace hyperhaar {
namespace {

constexpr int64_t kTupleBudget = int64_t{1} << 22;

std::string vertex_list(const std::vector<int32_t>& vs) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) os << ',';
    os << vs[i];
  }
  os << '}';
  return os.str();
}

int64_t factorial(int k) {
  int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int64_t ipow(int64_t base, int exp) {
  int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// All ways to group `pool` into disjoint parts of size >= 2, leaving any
// subset of it ungrouped.  Deterministic: the smallest remaining vertex
// either stays ungrouped or anchors a part drawn from the later vertices.
void partial_partitions_rec(
    const std::vector<int32_t>& pool, std::vector<int32_t> remaining,
    std::vector<std::vector<int32_t>>& current,
    std::vector<std::vector<std::vector<int32_t>>>& out) {
  if (remaining.empty()) {
    out.push_back(current);
    return;
  }
  const int32_t v = remaining.front();
  std::vector<int32_t> rest(remaining.begin() + 1, remaining.end());

  // v stays outside every part of this color.
  partial_partitions_rec(pool, rest, current, out);

  // v anchors a part together with a nonempty subset of `rest`.
  const size_t k = rest.size();
  for (uint32_t mask = 1; mask < (uint32_t{1} << k); ++mask) {
    std::vector<int32_t> part{v};
    std::vector<int32_t> next;
    for (size_t i = 0; i < k; ++i) {
      if (mask & (uint32_t{1} << i)) {
        part.push_back(rest[i]);
      } else {
        next.push_back(rest[i]);
      }
    }
    current.push_back(std::move(part));
    partial_partitions_rec(pool, next, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<std::vector<int32_t>>> partial_partitions(
    const std::vector<int32_t>& V) {
  std::vector<std::vector<std::vector<int32_t>>> out;
  std::vector<std::vector<int32_t>> current;
  partial_partitions_rec(V, V, current, out);
  return out;
}

void check_vertices(const std::vector<int32_t>& vs) {
  if (vs.empty()) {
    throw std::invalid_argument("graph: vertex set is empty");
  }
  for (size_t i = 0; i < vs.size(); ++i) {
    if (vs[i] < 1 || (i > 0 && vs[i] <= vs[i - 1])) {
      throw std::invalid_argument(
          "graph: vertices must be strictly increasing and >= 1");
    }
  }
}

// Shared enumeration core for sumprod and the inclusion-exclusion sum:
// walks X(G) propagating the per-color equality constraints and accumulates
// each tuple's sign product.  Returns the tuple count.
class TupleWalker {
 public:
  TupleWalker(TupleSet ts, const CoefficientField& coeffs)
      : ts_(std::move(ts)), coeffs_(coeffs), d_(ts_.d), n_(ts_.n) {
    if (coeffs.n() != ts_.n || coeffs.d() != ts_.d) {
      throw std::invalid_argument("sumprod: coefficient field mismatch");
    }
    const size_t V = ts_.vertices.size();
    // Budget: the unconstrained product of block sizes.
    const auto layer = enumerate_shapes(n_, d_);
    int64_t bound = 1;
    for (const auto& [lo, hi] : ts_.ranges) {
      const int64_t cnt = std::count_if(
          layer.begin(), layer.end(),
          [&](const ShapeVector& r) { return r[0] >= lo && r[0] <= hi; });
      bound *= cnt;
      if (bound > kTupleBudget) {
        throw BudgetError("sumprod: tuple count beyond " +
                          std::to_string(kTupleBudget));
      }
    }
    class_of_.assign(V, std::vector<int32_t>(static_cast<size_t>(d_ - 1), -1));
    class_owner_.resize(static_cast<size_t>(d_ - 1));
    class_value_.resize(static_cast<size_t>(d_ - 1));
    for (size_t cj = 0; cj < ts_.classes_by_color.size(); ++cj) {
      for (const auto& cls : ts_.classes_by_color[cj]) {
        const int32_t id = static_cast<int32_t>(class_owner_[cj].size());
        class_owner_[cj].push_back(
            *std::min_element(cls.begin(), cls.end()));
        class_value_[cj].push_back(0);
        for (int32_t pos : cls) {
          class_of_[static_cast<size_t>(pos)][cj] = id;
        }
      }
    }
    members_.assign(V, nullptr);
    shape_.assign(V, ShapeVector(static_cast<size_t>(d_), 0));
  }

  // Enumerates every tuple; `acc` receives one +1-weighted sign product per
  // tuple.  Returns the number of tuples.
  int64_t walk(detail::BucketAccumulator& acc) {
    acc_ = &acc;
    count_ = 0;
    vertex_rec(0);
    return count_;
  }

 private:
  void vertex_rec(size_t pos) {
    if (pos == ts_.vertices.size()) {
      acc_->add(std::span<const detail::SignedShape* const>(members_), 1);
      ++count_;
      return;
    }
    coord_rec(pos, 2, 0);
  }

  void coord_rec(size_t pos, int axis, int64_t sum) {
    const auto [lo, hi] = ts_.ranges[pos];
    // Each vertex keeps its own working shape: deeper vertices recurse while
    // this one's inner loops are still live, so a shared buffer would lose
    // the outer coordinates.
    ShapeVector& shape = shape_[pos];
    if (axis > d_) {
      const int64_t r1 = n_ - sum;
      if (r1 < lo || r1 > hi) return;
      shape[0] = static_cast<int32_t>(r1);
      auto it = pool_.find(shape);
      if (it == pool_.end()) {
        it = pool_.emplace(shape, detail::SignedShape{
                                      shape, detail::sign_table(
                                                 shape, coeffs_)})
                 .first;
      }
      members_[pos] = &it->second;
      vertex_rec(pos + 1);
      return;
    }
    const size_t cj = static_cast<size_t>(axis - 2);
    const int32_t cls = class_of_[pos][cj];
    if (cls >= 0 && class_owner_[cj][static_cast<size_t>(cls)] <
                        static_cast<int32_t>(pos)) {
      const int32_t val = class_value_[cj][static_cast<size_t>(cls)];
      if (sum + val > n_ - lo) return;
      shape[static_cast<size_t>(axis - 1)] = val;
      coord_rec(pos, axis + 1, sum + val);
      return;
    }
    for (int32_t val = 0; sum + val <= n_ - lo; ++val) {
      shape[static_cast<size_t>(axis - 1)] = val;
      if (cls >= 0) class_value_[cj][static_cast<size_t>(cls)] = val;
      coord_rec(pos, axis + 1, sum + val);
    }
  }

  TupleSet ts_;
  const CoefficientField& coeffs_;
  int d_;
  int n_;
  std::vector<std::vector<int32_t>> class_of_;     // [pos][color-2] -> class
  std::vector<std::vector<int32_t>> class_owner_;  // [color-2][class] -> pos
  std::vector<std::vector<int32_t>> class_value_;  // [color-2][class] -> value
  std::map<ShapeVector, detail::SignedShape> pool_;
  std::vector<const detail::SignedShape*> members_;
  std::vector<ShapeVector> shape_;  // [pos] -> working shape of that vertex
  detail::BucketAccumulator* acc_ = nullptr;
  int64_t count_ = 0;
};

ExactGrid fold_to_exact(detail::BucketAccumulator& acc, int d) {
  if (acc.empty()) {
    return detail::to_exact(
        detail::IntGrid(ShapeVector(static_cast<size_t>(d), 0)), Rational(1));
  }
  return detail::to_exact(acc.fold(acc.joint_resolution()), Rational(1));
}

std::string i128_to_string(__int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u =
      neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
          : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

double i128_to_double(__int128 v) {
  return static_cast<double>(static_cast<long double>(v));
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t m = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double num = 0, den = 0;
  for (size_t i = 0; i < m; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

// Per-axis test that the multiset {a1, b1, a2, b2} has only even
// multiplicities: either both pairs are internally equal, or the two pairs
// agree as multisets.
bool even_axis(int32_t a1, int32_t b1, int32_t a2, int32_t b2) {
  if (a1 == b1 && a2 == b2) return true;
  return std::minmax(a1, b1) == std::minmax(a2, b2);
}

}  // namespace

void ColoredGraph::add_edge(int32_t color, int32_t v, int32_t w) {
  if (v == w) {
    throw std::invalid_argument("graph: self-loops are not allowed");
  }
  if (color < 2) {
    throw std::invalid_argument("graph: colors start at 2");
  }
  edges[color].insert(std::minmax(v, w));
}

AdmissibleGraph validate_admissible(const ColoredGraph& g, int d) {
  if (d < 2) {
    throw std::invalid_argument("validate_admissible: d must be >= 2");
  }
  check_vertices(g.vertices);
  const auto& vs = g.vertices;
  const size_t V = vs.size();
  auto position = [&](int32_t v) -> size_t {
    const auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) {
      throw std::invalid_argument("graph: edge endpoint " + std::to_string(v) +
                                  " is not a vertex");
    }
    return static_cast<size_t>(it - vs.begin());
  };

  AdmissibleGraph out;
  out.graph = g;
  out.d = d;
  std::vector<bool> covered(V, false);

  for (const auto& [color, es] : g.edges) {
    if (color < 2 || color > d) {
      throw std::invalid_argument("graph: color " + std::to_string(color) +
                                  " outside 2.." + std::to_string(d));
    }
    if (es.empty()) continue;
    // Union-find over vertex positions.
    std::vector<size_t> parent(V);
    std::iota(parent.begin(), parent.end(), size_t{0});
    auto find = [&](size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : es) {
      if (e.first == e.second) {
        throw std::invalid_argument("graph: self-loops are not allowed");
      }
      parent[find(position(e.first))] = find(position(e.second));
    }
    // A vertex belongs to a component of this color iff it has an incident
    // edge; components are keyed by their union-find root.
    std::map<size_t, std::vector<int32_t>> comps;
    std::map<size_t, int64_t> edge_count;
    for (const auto& e : es) {
      ++edge_count[find(position(e.first))];
    }
    for (size_t i = 0; i < V; ++i) {
      const size_t root = find(i);
      if (edge_count.count(root)) comps[root].push_back(vs[i]);
    }
    for (auto& [root, members] : comps) {
      const int64_t k = static_cast<int64_t>(members.size());
      if (edge_count[root] != k * (k - 1) / 2) {
        throw NotAdmissible("edge set of color " + std::to_string(color) +
                            " does not decompose into disjoint cliques "
                            "(component " +
                            vertex_list(members) + " is not complete)");
      }
      for (int32_t m : members) covered[position(m)] = true;
      out.index += static_cast<int>(k - 1);
    }
    auto& list = out.cliques[color];
    for (auto& entry : comps) list.push_back(std::move(entry.second));
    std::sort(list.begin(), list.end());
  }

  for (size_t i = 0; i < V; ++i) {
    if (!covered[i]) {
      throw NotAdmissible("vertex " + std::to_string(vs[i]) +
                          " lies in no clique");
    }
  }

  // Intersection condition: any choice of one clique per color (over all
  // colors 2..d) meets in at most one vertex.  Vacuous if some color has no
  // clique.  Recorded, not fatal: over disjoint blocks a violating graph's
  // tuple set is empty.
  bool all_colors_present = true;
  for (int c = 2; c <= d; ++c) {
    if (!out.cliques.count(c) || out.cliques[c].empty()) {
      all_colors_present = false;
      break;
    }
  }
  if (all_colors_present) {
    std::vector<size_t> pick(static_cast<size_t>(d - 1), 0);
    while (true) {
      std::vector<int32_t> inter = out.cliques[2][pick[0]];
      for (int c = 3; c <= d; ++c) {
        const auto& q = out.cliques[c][pick[static_cast<size_t>(c - 2)]];
        std::vector<int32_t> next;
        std::set_intersection(inter.begin(), inter.end(), q.begin(), q.end(),
                              std::back_inserter(next));
        inter = std::move(next);
        if (inter.size() <= 1) break;
      }
      if (inter.size() > 1) {
        out.separated_colors = false;
        break;
      }
      // Odometer over clique choices.
      size_t c = 0;
      for (; c < pick.size(); ++c) {
        if (++pick[c] < out.cliques[static_cast<int32_t>(c + 2)].size()) break;
        pick[c] = 0;
      }
      if (c == pick.size()) break;
    }
  }
  return out;
}

std::vector<AdmissibleGraph> enumerate_admissible(
    const std::vector<int32_t>& V, int d) {
  if (d < 2) {
    throw std::invalid_argument("enumerate_admissible: d must be >= 2");
  }
  check_vertices(V);
  if (V.size() > 4) {
    throw BudgetError("enumerate_admissible: exhaustive mode handles at most "
                      "4 vertices");
  }
  std::vector<AdmissibleGraph> out;
  if (V.size() < 2) return out;

  const auto pps = partial_partitions(V);
  const size_t colors = static_cast<size_t>(d - 1);
  std::vector<size_t> pick(colors, 0);
  while (true) {
    // Coverage: every vertex grouped in at least one color.
    std::set<int32_t> coveredset;
    for (size_t c = 0; c < colors; ++c) {
      for (const auto& part : pps[pick[c]]) {
        coveredset.insert(part.begin(), part.end());
      }
    }
    if (coveredset.size() == V.size()) {
      ColoredGraph g;
      g.vertices = V;
      for (size_t c = 0; c < colors; ++c) {
        const int32_t color = static_cast<int32_t>(c + 2);
        for (const auto& part : pps[pick[c]]) {
          for (size_t i = 0; i < part.size(); ++i) {
            for (size_t j = i + 1; j < part.size(); ++j) {
              g.add_edge(color, part[i], part[j]);
            }
          }
        }
      }
      out.push_back(validate_admissible(g, d));
    }
    size_t c = colors;
    while (c > 0) {
      --c;
      if (++pick[c] < pps.size()) break;
      pick[c] = 0;
      if (c == 0) return out;
    }
  }
}

TupleSet tuple_set(const AdmissibleGraph& g, const RieszParams& params) {
  if (g.d != params.d) {
    throw std::invalid_argument("tuple_set: dimension mismatch");
  }
  TupleSet ts;
  ts.d = params.d;
  ts.n = params.n;
  ts.vertices = g.graph.vertices;
  for (int32_t v : ts.vertices) {
    if (v < 1 || v > params.q) {
      throw std::invalid_argument("tuple_set: vertex " + std::to_string(v) +
                                  " is not a block index");
    }
    ts.ranges.push_back(params.blocks[static_cast<size_t>(v - 1)]);
  }
  ts.classes_by_color.assign(static_cast<size_t>(params.d - 1), {});
  auto position = [&](int32_t v) {
    return static_cast<int32_t>(
        std::lower_bound(ts.vertices.begin(), ts.vertices.end(), v) -
        ts.vertices.begin());
  };
  for (const auto& [color, cliques] : g.cliques) {
    for (const auto& q : cliques) {
      std::vector<int32_t> cls;
      for (int32_t v : q) cls.push_back(position(v));
      ts.classes_by_color[static_cast<size_t>(color - 2)].push_back(cls);
    }
  }
  return ts;
}

ExactGrid sumprod(const TupleSet& ts, const CoefficientField& coeffs) {
  TupleWalker walker(ts, coeffs);
  detail::BucketAccumulator acc;
  walker.walk(acc);
  return fold_to_exact(acc, ts.d);
}

ExactGrid coincidence_sum(int t1, int t2, int k, const RieszParams& params,
                          const CoefficientField& coeffs) {
  if (k < 1 || k > params.d) {
    throw std::invalid_argument("coincidence_sum: coordinate out of range");
  }
  if (coeffs.n() != params.n || coeffs.d() != params.d) {
    throw std::invalid_argument("coincidence_sum: coefficient field mismatch");
  }
  const auto shapes1 = block_shapes(params, t1);
  const auto shapes2 = block_shapes(params, t2);
  if (static_cast<int64_t>(shapes1.size()) *
          static_cast<int64_t>(shapes2.size()) >
      kTupleBudget) {
    throw BudgetError("coincidence_sum: pair count beyond " +
                      std::to_string(kTupleBudget));
  }
  std::map<ShapeVector, detail::SignedShape> pool;
  auto signed_shape = [&](const ShapeVector& r) {
    auto it = pool.find(r);
    if (it == pool.end()) {
      it = pool.emplace(r, detail::SignedShape{
                               r, detail::sign_table(r, coeffs)})
               .first;
    }
    return &it->second;
  };
  detail::BucketAccumulator acc;
  for (const auto& r : shapes1) {
    for (const auto& s : shapes2) {
      if (r == s) continue;
      if (r[static_cast<size_t>(k - 1)] != s[static_cast<size_t>(k - 1)]) {
        continue;
      }
      const std::array<const detail::SignedShape*, 2> members{
          signed_shape(r), signed_shape(s)};
      acc.add(std::span<const detail::SignedShape* const>(members), 1);
    }
  }
  return fold_to_exact(acc, params.d);
}

std::vector<InExTerm> inclusion_exclusion_terms(const RieszParams& params) {
  if (params.q > 4) {
    throw BudgetError(
        "inclusion_exclusion: admissible-graph enumeration handles q <= 4");
  }
  std::vector<InExTerm> out;
  for (uint32_t mask = 1; mask < (uint32_t{1} << params.q); ++mask) {
    std::vector<int32_t> V;
    for (int t = 1; t <= params.q; ++t) {
      if (mask & (uint32_t{1} << (t - 1))) V.push_back(t);
    }
    if (V.size() < 2) continue;
    for (auto& g : enumerate_admissible(V, params.d)) {
      InExTerm term;
      term.weight = (g.index % 2 == 1) ? 1 : -1;
      for (const auto& [color, cliques] : g.cliques) {
        for (const auto& q : cliques) {
          term.weight *= factorial(static_cast<int>(q.size()) - 1);
        }
      }
      term.graph = std::move(g);
      out.push_back(std::move(term));
    }
  }
  return out;
}

ExactGrid inclusion_exclusion_psi_neg(const RieszParams& params,
                                      const CoefficientField& coeffs,
                                      std::optional<size_t> drop_term) {
  const Rational rt = params.exact_rho_tilde();
  const int64_t pnum = rt.num();
  const int64_t pden = rt.den();
  if (coeffs.n() != params.n || coeffs.d() != params.d) {
    throw std::invalid_argument(
        "inclusion_exclusion: coefficient field mismatch");
  }
  const auto terms = inclusion_exclusion_terms(params);
  const ShapeVector mres = detail::psi_resolution(params);
  std::vector<int64_t> acc(size_t{1} << shape_total(mres), 0);

  std::map<std::vector<int32_t>, detail::IntGrid> pp_cache;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (drop_term && *drop_term == i) continue;
    const auto& term = terms[i];
    const auto& V = term.graph.graph.vertices;

    auto it = pp_cache.find(V);
    if (it == pp_cache.end()) {
      std::vector<int> complement;
      for (int t = 1; t <= params.q; ++t) {
        if (!std::binary_search(V.begin(), V.end(), t)) {
          complement.push_back(t);
        }
      }
      it = pp_cache
               .emplace(V, detail::build_partial_product_int(
                               params, coeffs, complement))
               .first;
    }
    const detail::IntGrid& pp = it->second;

    detail::BucketAccumulator bucket;
    TupleWalker walker(tuple_set(term.graph, params), coeffs);
    walker.walk(bucket);
    if (bucket.empty()) continue;
    const detail::IntGrid sp = bucket.fold(bucket.joint_resolution());

    const int64_t w =
        term.weight * ipow(pnum, static_cast<int>(V.size()));
    const detail::CellMap to_sp(mres, sp.res);
    const detail::CellMap to_pp(mres, pp.res);
    for (int64_t c = 0; c < static_cast<int64_t>(acc.size()); ++c) {
      acc[static_cast<size_t>(c)] +=
          w * sp.v[static_cast<size_t>(to_sp(c))] *
          pp.v[static_cast<size_t>(to_pp(c))];
    }
  }

  const int64_t den = ipow(pden, params.q);
  std::vector<Rational> values(acc.size());
  for (size_t c = 0; c < acc.size(); ++c) {
    values[c] = Rational(acc[c], den);
  }
  return ExactGrid::from_values(mres, std::move(values));
}

BeckGainReport beck_gain_experiment(int d, const std::vector<int>& n_range,
                                    const std::vector<int>& p_list) {
  if (d != 3) {
    throw std::invalid_argument(
        "beck_gain_experiment: the two-axis reduction is implemented for "
        "d = 3");
  }
  if (n_range.size() < 2) {
    throw std::invalid_argument(
        "beck_gain_experiment: need at least two n values for a slope");
  }
  for (int p : p_list) {
    if (p < 2 || p % 2 != 0) {
      throw std::invalid_argument("beck_gain_experiment: p must be even");
    }
  }

  BeckGainReport rep;
  rep.d = d;
  rep.ns = n_range;
  rep.ps = p_list;

  std::vector<int> p_all = p_list;
  if (std::find(p_all.begin(), p_all.end(), 2) == p_all.end()) {
    p_all.push_back(2);
  }
  const int p_max = *std::max_element(p_all.begin(), p_all.end());

  std::vector<double> log_n, log_measured, log_naive, log_pinned;

  for (int n : n_range) {
    if (n < 2) {
      throw std::invalid_argument("beck_gain_experiment: n must be >= 2");
    }
    if (2 * n > kMaxGridBits) {
      throw CapacityError("beck_gain_experiment: grid of " +
                          std::to_string(2 * n) + " bits");
    }
    const auto params = derive_params(3, n, 2);
    const auto [lo, hi] = params.blocks[0];

    // Over-approximation of |Phi| per cell, to bound the moment sums.
    int64_t phi_bound = 0;
    for (int c = lo; c <= hi; ++c) {
      const int64_t N = n - c + 1;
      phi_bound += N * N + N;
    }
    if (static_cast<double>(p_max) * std::log2(static_cast<double>(phi_bound)) +
            2.0 * n >
        120.0) {
      throw CapacityError("beck_gain_experiment: moment accumulator width");
    }

    // --- Measured: single pass over the (x2, x3) grid.  With one level per
    // axis sign (+1 here; even moments are sign-independent) each r-function
    // splits per axis, the first axis squares away, and
    //   Phi(x2, x3) = sum_c [ G_c^2 - (n - c + 1) ],
    //   G_c = sum_{a+b=n-c} H_a(x2) H_b(x3).
    std::map<int, __int128> moment_sum;
    for (int p : p_all) moment_sum[p] = 0;
    const int64_t cells = int64_t{1} << n;
    std::vector<int> v2(static_cast<size_t>(n) + 1, 1);
    std::vector<int> v3(static_cast<size_t>(n) + 1, 1);
    for (int64_t i2 = 0; i2 < cells; ++i2) {
      for (int a = 0; a < n; ++a) {
        v2[static_cast<size_t>(a)] = ((i2 >> (n - a - 1)) & 1) ? 1 : -1;
      }
      for (int64_t i3 = 0; i3 < cells; ++i3) {
        for (int b = 0; b < n; ++b) {
          v3[static_cast<size_t>(b)] = ((i3 >> (n - b - 1)) & 1) ? 1 : -1;
        }
        int64_t phi = 0;
        for (int c = lo; c <= hi; ++c) {
          int64_t g = 0;
          for (int a = 0; a <= n - c; ++a) {
            g += v2[static_cast<size_t>(a)] *
                 v3[static_cast<size_t>(n - c - a)];
          }
          phi += g * g - (n - c + 1);
        }
        for (int p : p_all) {
          __int128 pw = 1;
          for (int e = 0; e < p; ++e) pw *= phi;
          moment_sum[p] += pw;
        }
      }
    }
    __int128 m2 = 0;
    for (int p : p_all) {
      const __int128 total = moment_sum[p];
      const __int128 cellcount = static_cast<__int128>(cells) * cells;
      if (total % cellcount != 0) {
        throw std::logic_error(
            "beck_gain_experiment: moment is not an integer");
      }
      const __int128 moment = total / cellcount;
      if (p == 2) m2 = moment;
      if (std::find(p_list.begin(), p_list.end(), p) != p_list.end()) {
        BeckGainPoint pt;
        pt.n = n;
        pt.p = p;
        pt.moment = i128_to_string(moment);
        pt.norm = std::pow(i128_to_double(moment), 1.0 / p);
        rep.measured.points.push_back(pt);
      }
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_measured.push_back(0.5 * std::log(i128_to_double(m2)));

    // --- Shapes of block 1, shared by the pair enumerations below.
    std::vector<std::array<int32_t, 3>> shapes;
    for (int c = lo; c <= hi; ++c) {
      for (int a = 0; a <= n - c; ++a) {
        shapes.push_back({static_cast<int32_t>(c), static_cast<int32_t>(a),
                          static_cast<int32_t>(n - c - a)});
      }
    }

    // --- Naive: the same pair sum without the first-coordinate coincidence.
    // Its second moment is the number of pair-of-pair patterns whose level
    // multiset is even in every axis.
    std::vector<std::array<int32_t, 6>> pairs;
    for (const auto& r : shapes) {
      for (const auto& s : shapes) {
        if (r == s) continue;
        pairs.push_back({r[0], r[1], r[2], s[0], s[1], s[2]});
      }
    }
    int64_t naive_count = 0;
    for (const auto& a : pairs) {
      for (const auto& b : pairs) {
        if (even_axis(a[0], a[3], b[0], b[3]) &&
            even_axis(a[1], a[4], b[1], b[4]) &&
            even_axis(a[2], a[5], b[2], b[5])) {
          ++naive_count;
        }
      }
    }
    BeckGainPoint np;
    np.n = n;
    np.p = 2;
    np.moment = std::to_string(naive_count);
    np.norm = std::sqrt(static_cast<double>(naive_count));
    rep.naive.points.push_back(np);
    log_naive.push_back(0.5 * std::log(static_cast<double>(naive_count)));

    // --- Pinned: both middle coordinates fixed to distinct values; take the
    // largest second moment over the pins.
    int64_t pinned_best = 0;
    for (int f1 = 0; f1 <= n; ++f1) {
      for (int f2 = 0; f2 <= n; ++f2) {
        if (f1 == f2) continue;
        std::vector<std::array<int32_t, 6>> ppairs;
        for (int c = lo; c <= hi; ++c) {
          if (n - c - f1 < 0 || n - c - f2 < 0) continue;
          ppairs.push_back({static_cast<int32_t>(c), static_cast<int32_t>(c),
                            static_cast<int32_t>(f1), static_cast<int32_t>(f2),
                            static_cast<int32_t>(n - c - f1),
                            static_cast<int32_t>(n - c - f2)});
        }
        int64_t cnt = 0;
        for (const auto& a : ppairs) {
          for (const auto& b : ppairs) {
            if (even_axis(a[0], a[1], b[0], b[1]) &&
                even_axis(a[2], a[3], b[2], b[3]) &&
                even_axis(a[4], a[5], b[4], b[5])) {
              ++cnt;
            }
          }
        }
        pinned_best = std::max(pinned_best, cnt);
      }
    }
    BeckGainPoint pp;
    pp.n = n;
    pp.p = 2;
    pp.moment = std::to_string(pinned_best);
    pp.norm = std::sqrt(static_cast<double>(pinned_best));
    rep.pinned.points.push_back(pp);
    log_pinned.push_back(0.5 * std::log(static_cast<double>(pinned_best)));
  }

  rep.measured.l2_slope = ls_slope(log_n, log_measured);
  rep.naive.l2_slope = ls_slope(log_n, log_naive);
  rep.pinned.l2_slope = ls_slope(log_n, log_pinned);
  rep.gain_gap = rep.naive.l2_slope - rep.measured.l2_slope;
  return rep;
}

}  // namespace hyperhaar
