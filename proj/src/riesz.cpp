#include "hyperhaar/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "hyperhaar/errors.hpp"
#include "hyperhaar/spectrum.hpp"
#include "riesz_internal.hpp"

namespace hyperhaar {

namespace {

int64_t ipow(int64_t base, int e) {
  int64_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Blocks for the given mode, or empty when the configuration is infeasible
// (shifted windows overlapping or empty, more blocks than values).
std::vector<std::pair<int, int>> make_blocks(BlockMode mode, int n, int q) {
  std::vector<std::pair<int, int>> blocks;
  if (mode == BlockMode::Partition) {
    if (q > n) return {};
    const int base = n / q;
    const int rem = n % q;
    int lo = 1;
    for (int t = 0; t < q; ++t) {
      const int len = base + (t < rem ? 1 : 0);
      blocks.emplace_back(lo, lo + len - 1);
      lo += len;
    }
    return blocks;
  }
  // Shifted windows: integers j in [1, n] with |j - t*n/q| < max(q,4)/4,
  // i.e. |4(jq - tn)| < q*max(q,4) exactly.
  const int64_t width = int64_t{q} * std::max(q, 4);
  for (int t = 1; t <= q; ++t) {
    int lo = 0, hi = -1;
    for (int j = 1; j <= n; ++j) {
      if (std::abs(int64_t{4} * (int64_t{j} * q - int64_t{t} * n)) < width) {
        if (lo == 0) lo = j;
        hi = j;
      }
    }
    if (lo == 0) return {};  // empty window
    blocks.emplace_back(lo, hi);
  }
  for (size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].first <= blocks[i - 1].second) return {};  // overlap
  }
  return blocks;
}

}  // namespace

Rational RieszParams::rho_sq() const {
  return Rational(q) / Rational(ipow(n, d - 1));
}

Rational RieszParams::exact_rho_tilde() const {
  if (!rho_surrogate) {
    throw std::invalid_argument(
        "riesz: exact mode requires a rational rho surrogate");
  }
  if (rho_surrogate->sign() <= 0) {
    throw std::invalid_argument("riesz: rho surrogate must be positive");
  }
  return *rho_surrogate;
}

bool RieszParams::covers(int r1) const { return block_of(r1) != 0; }

int RieszParams::block_of(int r1) const {
  for (size_t t = 0; t < blocks.size(); ++t) {
    if (blocks[t].first <= r1 && r1 <= blocks[t].second) {
      return static_cast<int>(t) + 1;
    }
  }
  return 0;
}

RieszParams derive_params(int d, int n, std::optional<int> q_request,
                          BlockMode mode, std::optional<Rational> rho_surrogate,
                          std::optional<Rational> a,
                          std::optional<Rational> eps) {
  if (d < 2) throw std::invalid_argument("derive_params: need d >= 2");
  if (n < 1) throw std::invalid_argument("derive_params: need n >= 1");
  RieszParams p;
  p.d = d;
  p.n = n;
  p.a = a.value_or(Rational(1, 2));
  p.b = Rational(1, 4);
  p.eps = eps.value_or(Rational(1, int64_t{1} * d * d));
  p.mode = mode;
  p.rho_surrogate = std::move(rho_surrogate);
  int q_raw;
  if (q_request) {
    if (*q_request < 1) {
      throw std::invalid_argument("derive_params: need q >= 1");
    }
    q_raw = *q_request;
  } else {
    q_raw = static_cast<int>(std::floor(p.a.to_double() *
                                        std::pow(double(n), p.eps.to_double())));
    q_raw = std::max(q_raw, 2);
  }
  p.q_requested = q_raw;
  int q = std::min(q_raw, std::max(2, n / 2));
  for (;; --q) {
    auto blocks = make_blocks(mode, n, q);
    if (!blocks.empty()) {
      p.q = q;
      p.blocks = std::move(blocks);
      break;
    }
    if (q <= 1) {
      throw std::invalid_argument("derive_params: no feasible block layout");
    }
  }
  const double nfac = std::pow(double(n), -(d - 1) / 2.0);
  p.rho = std::sqrt(double(p.q)) * nfac;
  p.rho_tilde = p.a.to_double() * std::pow(double(p.q), 0.25) * nfac;
  return p;
}

std::vector<ShapeVector> block_shapes(const RieszParams& params, int t) {
  if (t < 1 || t > params.q) {
    throw std::invalid_argument("block_shapes: block index out of range");
  }
  const auto [lo, hi] = params.blocks[static_cast<size_t>(t) - 1];
  std::vector<ShapeVector> out;
  for (auto& r : enumerate_shapes(params.n, params.d)) {
    if (r[0] >= lo && r[0] <= hi) out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

std::vector<int8_t> sign_table(const ShapeVector& r,
                               const CoefficientField& coeffs) {
  const int d = static_cast<int>(r.size());
  const int64_t bits = shape_total(r);
  std::vector<int8_t> tab(size_t{1} << bits);
  DyadicRectangle R;
  R.sides.resize(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) R.sides[static_cast<size_t>(t)].level = r[t];
  for (int64_t idx = 0; idx < static_cast<int64_t>(tab.size()); ++idx) {
    int64_t rest = idx;
    for (int t = d - 1; t >= 0; --t) {
      R.sides[static_cast<size_t>(t)].pos = rest & ((int64_t{1} << r[t]) - 1);
      rest >>= r[t];
    }
    tab[static_cast<size_t>(idx)] =
        static_cast<int8_t>(coeffs.sign_of(R));
  }
  return tab;
}

ShapeVector product_resolution(std::span<const SignedShape* const> members) {
  if (members.empty()) {
    throw std::invalid_argument("product_resolution: empty tuple");
  }
  ShapeVector m(members.front()->r.size(), 0);
  for (const SignedShape* mem : members) {
    for (size_t t = 0; t < m.size(); ++t) {
      m[t] = std::max(m[t], mem->r[t] + 1);
    }
  }
  return m;
}

void add_sign_product(IntGrid& g, std::span<const SignedShape* const> members,
                      int32_t scale) {
  const int d = static_cast<int>(g.res.size());
  const size_t k = members.size();
  for (const SignedShape* mem : members) {
    if (static_cast<int>(mem->r.size()) != d) {
      throw std::invalid_argument("add_sign_product: dimension mismatch");
    }
    for (int t = 0; t < d; ++t) {
      if (g.res[static_cast<size_t>(t)] < mem->r[static_cast<size_t>(t)] + 1) {
        throw std::invalid_argument(
            "add_sign_product: grid does not resolve a member");
      }
    }
  }
  std::vector<int64_t> pos(k, 0);
  auto rec = [&](auto&& self, int axis, int64_t base, int32_t sign) -> void {
    const int m = g.res[static_cast<size_t>(axis)];
    const int64_t cells = int64_t{1} << m;
    const std::vector<int64_t> saved = pos;
    for (int64_t j = 0; j < cells; ++j) {
      int32_t s = sign;
      for (size_t i = 0; i < k; ++i) {
        const int r = members[i]->r[static_cast<size_t>(axis)];
        pos[i] = (saved[i] << r) | (j >> (m - r));
        s = ((j >> (m - r - 1)) & 1) ? s : -s;
      }
      const int64_t off = (base << m) | j;
      if (axis == d - 1) {
        int32_t val = s;
        for (size_t i = 0; i < k; ++i) {
          val *= members[i]->eps[static_cast<size_t>(pos[i])];
        }
        g.v[static_cast<size_t>(off)] += scale * val;
      } else {
        self(self, axis + 1, off, s);
      }
    }
  };
  rec(rec, 0, 0, 1);
}

void add_refined(IntGrid& dst, const IntGrid& src) {
  const CellMap map(dst.res, src.res);
  const int64_t cells = dst.size();
  for (int64_t i = 0; i < cells; ++i) {
    dst.v[static_cast<size_t>(i)] += src.v[static_cast<size_t>(map(i))];
  }
}

void BucketAccumulator::add(std::span<const SignedShape* const> members,
                            int32_t scale) {
  ShapeVector res = product_resolution(members);
  auto it = buckets_.find(res);
  if (it == buckets_.end()) {
    it = buckets_.emplace(res, IntGrid(res)).first;
  }
  add_sign_product(it->second, members, scale);
}

ShapeVector BucketAccumulator::joint_resolution() const {
  if (buckets_.empty()) {
    throw std::logic_error("BucketAccumulator: no buckets");
  }
  ShapeVector join = buckets_.begin()->first;
  for (const auto& [res, g] : buckets_) join = common_resolution(join, res);
  return join;
}

IntGrid BucketAccumulator::fold(const ShapeVector& target) {
  std::vector<IntGrid> grids;
  grids.reserve(buckets_.size());
  for (auto& [res, g] : buckets_) grids.push_back(std::move(g));
  buckets_.clear();
  if (grids.empty()) return IntGrid(target);
  std::sort(grids.begin(), grids.end(),
            [](const IntGrid& a, const IntGrid& b) {
              return shape_total(a.res) < shape_total(b.res);
            });
  IntGrid cur = std::move(grids.front());
  for (size_t i = 1; i < grids.size(); ++i) {
    const ShapeVector join = common_resolution(cur.res, grids[i].res);
    if (join == cur.res) {
      add_refined(cur, grids[i]);
    } else {
      IntGrid next(join);
      add_refined(next, cur);
      add_refined(next, grids[i]);
      cur = std::move(next);
    }
  }
  if (cur.res != target) {
    IntGrid next(target);
    add_refined(next, cur);
    cur = std::move(next);
  }
  return cur;
}

IntGrid build_block_int(const RieszParams& params, int t,
                        const CoefficientField& coeffs) {
  if (t < 1 || t > params.q) {
    throw std::invalid_argument("block_sum: block index out of range");
  }
  const auto [lo, hi] = params.blocks[static_cast<size_t>(t) - 1];
  ShapeVector res(static_cast<size_t>(params.d), params.n - lo + 1);
  res[0] = hi + 1;
  IntGrid g(res);
  // Fill the spectral slots (one +-1 per rectangle of each shape in the
  // block), then invert the transform axis by axis.
  std::vector<int64_t> pos(static_cast<size_t>(params.d));
  for (const ShapeVector& r : block_shapes(params, t)) {
    const auto tab = sign_table(r, coeffs);
    for (int64_t idx = 0; idx < static_cast<int64_t>(tab.size()); ++idx) {
      int64_t rest = idx;
      for (int ax = params.d - 1; ax >= 0; --ax) {
        pos[static_cast<size_t>(ax)] = rest & ((int64_t{1} << r[ax]) - 1);
        rest >>= r[ax];
      }
      int64_t lin = 0;
      for (int ax = 0; ax < params.d; ++ax) {
        lin = (lin << res[static_cast<size_t>(ax)]) |
              slot_of(r[ax], pos[static_cast<size_t>(ax)]);
      }
      g.v[static_cast<size_t>(lin)] += tab[static_cast<size_t>(idx)];
    }
  }
  std::span<int32_t> view(g.v);
  for (int axis = 0; axis < params.d; ++axis) {
    for_each_line<int32_t>(view, res, axis,
                           [](std::vector<int32_t>& buf) {
                             line_synthesize<int32_t>(buf);
                           });
  }
  return g;
}

ShapeVector psi_resolution(const RieszParams& params) {
  ShapeVector res(static_cast<size_t>(params.d), 0);
  for (const auto& [lo, hi] : params.blocks) {
    res[0] = std::max(res[0], hi + 1);
    for (size_t t = 1; t < res.size(); ++t) {
      res[t] = std::max(res[t], params.n - lo + 1);
    }
  }
  return res;
}

IntGrid build_partial_product_int(const RieszParams& params,
                                  const CoefficientField& coeffs,
                                  std::span<const int> ts) {
  const Rational rt = params.exact_rho_tilde();
  const int64_t pnum = rt.num();
  const int64_t pden = rt.den();
  if (ts.empty()) {
    IntGrid unit(ShapeVector(static_cast<size_t>(params.d), 0));
    unit.v[0] = 1;
    return unit;
  }
  // Overflow guard on the int32 numerators.
  int64_t bound = 1;
  for (int t : ts) {
    const int64_t sz =
        static_cast<int64_t>(block_shapes(params, t).size());
    bound *= pden + pnum * sz;
    if (bound > std::numeric_limits<int32_t>::max()) {
      throw OverflowError("riesz: product numerator exceeds 32-bit range");
    }
  }
  ShapeVector res(static_cast<size_t>(params.d), 0);
  std::vector<IntGrid> factors;
  for (int t : ts) {
    factors.push_back(build_block_int(params, t, coeffs));
    res = common_resolution(res, factors.back().res);
  }
  IntGrid out(res);
  const int64_t cells = out.size();
  for (size_t i = 0; i < factors.size(); ++i) {
    const CellMap map(res, factors[i].res);
    const auto& fv = factors[i].v;
    const int32_t snum = static_cast<int32_t>(pden);
    const int32_t pn = static_cast<int32_t>(pnum);
    if (i == 0) {
      for (int64_t c = 0; c < cells; ++c) {
        out.v[static_cast<size_t>(c)] =
            snum + pn * fv[static_cast<size_t>(map(c))];
      }
    } else {
      for (int64_t c = 0; c < cells; ++c) {
        out.v[static_cast<size_t>(c)] *=
            snum + pn * fv[static_cast<size_t>(map(c))];
      }
    }
  }
  return out;
}

std::vector<IntGrid> build_sd_ints(const RieszParams& params,
                                   const CoefficientField& coeffs) {
  const int q = params.q;
  // Member pools: every block shape with its sign table.
  std::vector<std::vector<SignedShape>> pool(static_cast<size_t>(q));
  for (int t = 1; t <= q; ++t) {
    for (const ShapeVector& r : block_shapes(params, t)) {
      pool[static_cast<size_t>(t - 1)].push_back(
          SignedShape{r, sign_table(r, coeffs)});
    }
  }
  std::vector<IntGrid> out;
  // Order 1: plain block sums, spectral route.
  {
    IntGrid s1(psi_resolution(params));
    for (int t = 1; t <= q; ++t) {
      add_refined(s1, build_block_int(params, t, coeffs));
    }
    out.push_back(std::move(s1));
  }
  auto distinct = [&](const SignedShape* a, const SignedShape* b) {
    for (size_t j = 0; j < a->r.size(); ++j) {
      if (a->r[j] == b->r[j]) return false;
    }
    return true;
  };
  for (int k = 2; k <= q; ++k) {
    BucketAccumulator acc;
    std::vector<int> combo;          // 1-based ascending block indices
    std::vector<const SignedShape*> chosen;
    auto tuples = [&](auto&& self, size_t slot) -> void {
      if (slot == combo.size()) {
        acc.add(chosen, 1);
        return;
      }
      for (const SignedShape& cand :
           pool[static_cast<size_t>(combo[slot] - 1)]) {
        bool ok = true;
        for (const SignedShape* prev : chosen) {
          if (!distinct(prev, &cand)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        chosen.push_back(&cand);
        self(self, slot + 1);
        chosen.pop_back();
      }
    };
    auto combos = [&](auto&& self, int next) -> void {
      if (static_cast<int>(combo.size()) == k) {
        tuples(tuples, 0);
        return;
      }
      for (int t = next; t <= q; ++t) {
        combo.push_back(t);
        self(self, t + 1);
        combo.pop_back();
      }
    };
    combos(combos, 1);
    if (acc.empty()) {
      out.push_back(IntGrid(ShapeVector(static_cast<size_t>(params.d), 0)));
    } else {
      out.push_back(acc.fold(acc.joint_resolution()));
    }
  }
  return out;
}

ExactGrid to_exact(const IntGrid& g, const Rational& scale) {
  std::vector<Rational> vals(g.v.size());
  for (size_t i = 0; i < vals.size(); ++i) {
    vals[i] = Rational(g.v[i]) * scale;
  }
  return ExactGrid::from_values(g.res, std::move(vals));
}

Rational layer_pairing_int(const IntGrid& g, const Rational& scale,
                           const CoefficientField& coeffs) {
  std::vector<int64_t> data(g.v.begin(), g.v.end());
  haar_transform_unnormalized(data, g.res);
  const int64_t total = shape_total(g.res);
  Rat128 acc;
  for (const auto& [R, alpha] : coeffs.layer()) {
    const ShapeVector r = R.shape();
    bool resolvable = true;
    int64_t lin = 0;
    int64_t rbits = 0;
    for (size_t ax = 0; ax < r.size(); ++ax) {
      if (r[ax] >= g.res[ax]) {
        resolvable = false;  // no such atom on this grid: coefficient 0
        break;
      }
      lin = (lin << g.res[ax]) | slot_of(r[ax], R.sides[ax].pos);
      rbits += r[ax];
    }
    if (!resolvable) continue;
    const int64_t slot = data[static_cast<size_t>(lin)];
    if (slot == 0) continue;
    // coefficient = slot * 2^{rbits - total}; pairing term multiplies the
    // atom's volume 2^{-n}.
    acc.add_product(alpha * Rational(slot),
                    Rational::dyadic(static_cast<int>(total - rbits +
                                                      coeffs.n())));
  }
  return acc.to_rational() * scale;
}

}  // namespace detail

ExactGrid rfunction(const ShapeVector& r, const CoefficientField& coeffs) {
  if (static_cast<int>(r.size()) != coeffs.d()) {
    throw std::invalid_argument("rfunction: dimension mismatch");
  }
  detail::SignedShape mem{r, detail::sign_table(r, coeffs)};
  const detail::SignedShape* ptr = &mem;
  detail::IntGrid g(detail::product_resolution({&ptr, 1}));
  detail::add_sign_product(g, {&ptr, 1}, 1);
  return detail::to_exact(g, Rational(1));
}

ExactGrid rfunction(const ShapeVector& r,
                    const std::map<DyadicRectangle, int>& signs) {
  detail::SignedShape mem;
  mem.r = r;
  mem.eps.assign(size_t{1} << shape_total(r), 0);
  for (const auto& R : rectangles_of_shape(r)) {
    auto it = signs.find(R);
    if (it == signs.end()) {
      throw std::invalid_argument("rfunction: missing sign for a rectangle");
    }
    if (it->second != 1 && it->second != -1) {
      throw std::invalid_argument("rfunction: signs must be +1 or -1");
    }
    int64_t idx = 0;
    for (size_t ax = 0; ax < r.size(); ++ax) {
      idx = (idx << r[ax]) | R.sides[ax].pos;
    }
    mem.eps[static_cast<size_t>(idx)] = static_cast<int8_t>(it->second);
  }
  const detail::SignedShape* ptr = &mem;
  detail::IntGrid g(detail::product_resolution({&ptr, 1}));
  detail::add_sign_product(g, {&ptr, 1}, 1);
  return detail::to_exact(g, Rational(1));
}

ExactGrid block_sum(const RieszParams& params, int t,
                    const CoefficientField& coeffs) {
  return detail::to_exact(detail::build_block_int(params, t, coeffs),
                          Rational(1));
}

ExactGrid hyperbolic_sum(const CoefficientField& coeffs, bool include_coarse) {
  HaarSpectrum<Rational> spec;
  spec.mean = Rational(0);
  ShapeVector res(static_cast<size_t>(coeffs.d()), 0);
  auto take = [&](const std::map<DyadicRectangle, Rational>& part) {
    for (const auto& [R, alpha] : part) {
      for (size_t ax = 0; ax < res.size(); ++ax) {
        res[ax] = std::max(res[ax], R.sides[ax].level + 1);
      }
      spec.coeffs.emplace(R, alpha);
    }
  };
  take(coeffs.layer());
  if (include_coarse) take(coeffs.coarse());
  spec.resolution = res;
  return haar_synthesize(spec, res);
}

ExactGrid riesz_product(const RieszParams& params,
                        const CoefficientField& coeffs) {
  const Rational rt = params.exact_rho_tilde();
  std::vector<int> all(static_cast<size_t>(params.q));
  std::iota(all.begin(), all.end(), 1);
  const detail::IntGrid p =
      detail::build_partial_product_int(params, coeffs, all);
  return detail::to_exact(p, Rational(1, ipow(rt.den(), params.q)));
}

Decomposition decompose(const RieszParams& params,
                        const CoefficientField& coeffs) {
  if (params.q > 4) {
    throw BudgetError("decompose: exhaustive tuple enumeration needs q <= 4");
  }
  const Rational rt = params.exact_rho_tilde();
  const int64_t pnum = rt.num();
  const int64_t pden = rt.den();
  const int q = params.q;
  auto sd = detail::build_sd_ints(params, coeffs);
  std::vector<int> all(static_cast<size_t>(q));
  std::iota(all.begin(), all.end(), 1);
  detail::IntGrid psi = detail::build_partial_product_int(params, coeffs, all);

  // neg = psi - 1 - sum_k rho~^k S_k, assembled on psi's grid over the
  // common denominator den^q.
  detail::IntGrid neg(psi.res);
  const int64_t unit = ipow(pden, q);
  for (size_t c = 0; c < neg.v.size(); ++c) {
    neg.v[c] = psi.v[c] - static_cast<int32_t>(unit);
  }
  for (int k = 1; k <= q; ++k) {
    const auto& sk = sd[static_cast<size_t>(k - 1)];
    const int64_t w = ipow(pnum, k) * ipow(pden, q - k);
    const detail::CellMap map(neg.res, sk.res);
    for (int64_t c = 0; c < neg.size(); ++c) {
      neg.v[static_cast<size_t>(c)] -= static_cast<int32_t>(w) *
          sk.v[static_cast<size_t>(map(c))];
    }
  }

  Decomposition out;
  out.psi = detail::to_exact(psi, Rational(1, unit));
  psi = detail::IntGrid();
  for (int k = 1; k <= q; ++k) {
    out.sd_by_order.push_back(detail::to_exact(
        sd[static_cast<size_t>(k - 1)], rt.pow(static_cast<unsigned>(k))));
    sd[static_cast<size_t>(k - 1)] = detail::IntGrid();
  }
  out.neg = detail::to_exact(neg, Rational(1, unit));
  return out;
}

PsiStats psi_stats(const ExactGrid& psi) {
  PsiStats s;
  s.mean = integral(psi);
  s.l1 = norm_lp_pow(psi, 1);
  s.l2_sq = norm_lp_pow(psi, 2);
  s.neg_measure = negative_measure(psi);
  s.l2 = std::sqrt(s.l2_sq.to_double());
  return s;
}

DualityCertificate duality_certificate(const CoefficientField& coeffs,
                                       const RieszParams& params) {
  if (coeffs.d() != params.d || coeffs.n() != params.n) {
    throw std::invalid_argument("duality_certificate: parameter mismatch");
  }
  const Rational rt = params.exact_rho_tilde();
  DualityCertificate cert;
  cert.covered_mass = coeffs.layer_abs_sum_if(
      [&](const ShapeVector& r) { return params.covers(r[0]); });
  cert.full_mass = coeffs.layer_abs_sum();

  auto sd = detail::build_sd_ints(params, coeffs);
  cert.order1_pairing = detail::layer_pairing_int(sd[0], rt, coeffs);
  const Rational closed =
      rt * Rational::dyadic(params.n) * cert.covered_mass;
  if (cert.order1_pairing != closed) {
    throw std::logic_error(
        "duality_certificate: order-1 pairing does not match its closed form");
  }
  for (int k = 2; k <= params.q; ++k) {
    const Rational pk = detail::layer_pairing_int(
        sd[static_cast<size_t>(k - 1)], rt.pow(static_cast<unsigned>(k)),
        coeffs);
    if (pk != Rational(0)) {
      throw std::logic_error(
          "duality_certificate: an order >= 2 term pairs nonzero");
    }
  }
  cert.pairing = cert.order1_pairing;

  // || sum_k rho~^k S_k ||_1 over the joint grid, integer numerators over
  // den^q.
  ShapeVector join = sd[0].res;
  for (const auto& g : sd) join = common_resolution(join, g.res);
  const int q = params.q;
  std::vector<int32_t> sum(size_t{1} << shape_total(join), 0);
  for (int k = 1; k <= q; ++k) {
    const auto& sk = sd[static_cast<size_t>(k - 1)];
    const int64_t w = ipow(rt.num(), k) * ipow(rt.den(), q - k);
    const detail::CellMap map(join, sk.res);
    for (int64_t c = 0; c < static_cast<int64_t>(sum.size()); ++c) {
      sum[static_cast<size_t>(c)] += static_cast<int32_t>(w) *
          sk.v[static_cast<size_t>(map(c))];
    }
  }
  int64_t abs_sum = 0;
  for (int32_t v : sum) abs_sum += std::abs(v);
  cert.l1 = Rational(abs_sum) *
            Rational::dyadic(static_cast<int>(shape_total(join))) /
            Rational(ipow(rt.den(), q));
  if (cert.l1 == Rational(0)) {
    throw std::domain_error(
        "duality_certificate: test function vanishes (l1 = 0)");
  }
  cert.lower_bound = cert.pairing / cert.l1;
  return cert;
}

InequalityReport verify_inequality(const CoefficientField& coeffs,
                                   InequalityForm form) {
  const int d = coeffs.d();
  const int n = coeffs.n();
  InequalityReport rep;
  rep.form = form;
  rep.lhs = Rational::dyadic(n) * coeffs.layer_abs_sum();
  rep.sup = norm_inf(hyperbolic_sum(coeffs, true));
  switch (form) {
    case InequalityForm::Average:
      rep.power = (d - 1) / 2.0;
      break;
    case InequalityForm::Conjecture:
      rep.power = (d - 2) / 2.0;
      break;
    case InequalityForm::Main:
      rep.power = (d - 1) / 2.0 - 1.0 / (4.0 * d * d);
      break;
    case InequalityForm::TalagrandD2:
      if (d != 2) {
        throw std::invalid_argument(
            "verify_inequality: the dimension-2 form needs d = 2");
      }
      rep.power = 0.0;
      break;
  }
  rep.rhs = std::pow(double(n), rep.power) * rep.sup.to_double();
  rep.ratio = rep.lhs == Rational(0)
                  ? std::numeric_limits<double>::infinity()
                  : rep.rhs / rep.lhs.to_double();
  rep.asserted = form == InequalityForm::Average;
  if (rep.asserted) {
    // lhs^2 <= #shapes * sup^2 exactly (Cauchy-Schwarz on the layer plus
    // orthogonality); the n-power form follows since #shapes <= n^{d-1}
    // at the asserted scales.
    const Rational count(binomial(n + d - 1, d - 1));
    rep.holds = rep.lhs * rep.lhs <= count * rep.sup * rep.sup;
  } else {
    rep.holds = rep.lhs.to_double() <= rep.rhs;
  }
  return rep;
}

std::vector<MomentPoint> moment_profile(const ExactGrid& F,
                                        const Rational& rho_sq,
                                        const std::vector<int>& ps) {
  if (rho_sq.sign() < 0) {
    throw std::invalid_argument("moment_profile: rho^2 must be nonnegative");
  }
  std::vector<MomentPoint> out;
  for (int p : ps) {
    if (p < 2 || p % 2 != 0) {
      throw std::invalid_argument("moment_profile: p must be even");
    }
    MomentPoint pt;
    pt.p = p;
    pt.norm_pow = rho_sq.pow(static_cast<unsigned>(p / 2)) *
                  norm_lp_pow(F, p);
    pt.norm = std::pow(pt.norm_pow.to_double(), 1.0 / p);
    pt.ratio = pt.norm / std::sqrt(double(p));
    out.push_back(pt);
  }
  return out;
}

}  // namespace hyperhaar
