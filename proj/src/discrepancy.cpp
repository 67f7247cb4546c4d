#include "hyperhaar/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/errors.hpp"
#include "hyperhaar/grid.hpp"

namespace hyperhaar {
namespace {

// Digit reversal of i in base b as an exact rational in [0,1).
Rational radical_inverse(int64_t i, int64_t b) {
  int64_t num = 0;
  int64_t den = 1;
  while (i > 0) {
    if (__builtin_mul_overflow(den, b, &den) ||
        __builtin_mul_overflow(num, b, &num)) {
      throw OverflowError("radical inverse does not fit 64 bits");
    }
    num += i % b;
    i /= b;
  }
  return Rational(num, den);
}

void check_points(const PointSet& A) {
  if (A.points.empty()) {
    throw std::invalid_argument("point set: need at least one point");
  }
  for (const auto& p : A.points) {
    if (static_cast<int>(p.size()) != A.d) {
      throw std::invalid_argument("point set: row width does not match d");
    }
    for (const Rational& c : p) {
      if (c.sign() < 0 || c >= Rational(1)) {
        throw std::invalid_argument("point set: coordinate outside [0,1)");
      }
    }
  }
}

// "p", "p/q", or a decimal like "0.25".
Rational parse_coordinate(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rational::parse(s);
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto dot2 = s.find('.');
  const std::string_view ipart = s.substr(0, dot2);
  const std::string_view fpart = s.substr(dot2 + 1);
  if (fpart.size() > 18) {
    throw OverflowError("decimal coordinate has too many digits");
  }
  int64_t num = 0;
  int64_t den = 1;
  for (std::string_view part : {ipart, fpart}) {
    for (char c : part) {
      if (c < '0' || c > '9') {
        throw std::invalid_argument("bad decimal coordinate '" +
                                    std::string(s) + "'");
      }
      if (__builtin_mul_overflow(num, int64_t{10}, &num)) {
        throw OverflowError("decimal coordinate out of range");
      }
      num += c - '0';
    }
  }
  for (size_t k = 0; k < fpart.size(); ++k) den *= 10;
  return Rational(negative ? -num : num, den);
}

// Per-rectangle sums of the counting tensor factors for one shape: index in
// rectangles_of_shape order -> sum over points of prod_t c(p_t, R_t).  Only
// rectangles whose interior meets a point appear.
std::map<int64_t, Rational> counting_sums(const PointSet& A,
                                          const ShapeVector& r) {
  std::map<int64_t, Rational> out;
  for (const auto& p : A.points) {
    int64_t lin = 0;
    Rational prod(1);
    bool zero = false;
    for (size_t t = 0; t < r.size(); ++t) {
      const int32_t k = r[t];
      const Rational scaled = p[t] * Rational(int64_t{1} << k);
      const int64_t j = scaled.num() / scaled.den();  // floor, p >= 0
      const DyadicInterval I{k, j};
      const Rational c = counting_haar_factor(p[t], I);
      if (c.is_zero()) {
        zero = true;
        break;
      }
      prod *= c;
      lin = (lin << k) | j;
    }
    if (!zero) out[lin] += prod;
  }
  return out;
}

// N * prod_t |I_t|^2 / 4 for the layer of total level n: the linear tensor
// factor shared by every rectangle of every shape in the layer.
Rational layer_linear_term(int64_t N, int n, int d) {
  return Rational(N) * Rational::dyadic(2 * n + 2 * d);
}

}  // namespace

PointSet generate(PointKind kind, int64_t N, int d, uint64_t seed) {
  if (N < 1) throw std::invalid_argument("generate: need N >= 1");
  if (d < 1) throw std::invalid_argument("generate: need d >= 1");
  PointSet A;
  A.d = d;
  switch (kind) {
    case PointKind::VanDerCorput: {
      if (d != 2) {
        throw std::invalid_argument(
            "generate: the van der Corput set is 2-dimensional");
      }
      A.generator = "van_der_corput";
      for (int64_t i = 0; i < N; ++i) {
        A.points.push_back({Rational(i, N), radical_inverse(i, 2)});
      }
      break;
    }
    case PointKind::Hammersley: {
      static constexpr int64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19};
      if (d < 2 || d > 1 + static_cast<int>(std::size(kBases))) {
        throw std::invalid_argument("generate: hammersley supports 2 <= d <= " +
                                    std::to_string(1 + std::size(kBases)));
      }
      A.generator = "hammersley";
      for (int64_t i = 0; i < N; ++i) {
        std::vector<Rational> p{Rational(i, N)};
        for (int t = 0; t + 1 < d; ++t) {
          p.push_back(radical_inverse(i, kBases[t]));
        }
        A.points.push_back(std::move(p));
      }
      break;
    }
    case PointKind::Random: {
      A.generator = "random";
      std::mt19937_64 rng(seed);
      for (int64_t i = 0; i < N; ++i) {
        std::vector<Rational> p;
        for (int t = 0; t < d; ++t) {
          p.emplace_back(static_cast<int64_t>(rng() >> 52),
                         int64_t{1} << 12);
        }
        A.points.push_back(std::move(p));
      }
      break;
    }
    case PointKind::Grid: {
      const int64_t guess =
          std::llround(std::pow(static_cast<double>(N), 1.0 / d));
      int64_t k = 0;
      for (int64_t cand = std::max<int64_t>(1, guess - 1); cand <= guess + 1;
           ++cand) {
        int64_t pw = 1;
        for (int t = 0; t < d; ++t) pw *= cand;
        if (pw == N) {
          k = cand;
          break;
        }
      }
      if (k == 0) {
        throw std::invalid_argument(
            "generate: grid needs N = k^d for an integer k");
      }
      A.generator = "grid";
      std::vector<int64_t> ix(static_cast<size_t>(d), 0);
      for (int64_t i = 0; i < N; ++i) {
        std::vector<Rational> p;
        for (int t = 0; t < d; ++t) p.emplace_back(ix[static_cast<size_t>(t)], k);
        A.points.push_back(std::move(p));
        for (int t = d - 1; t >= 0; --t) {
          if (++ix[static_cast<size_t>(t)] < k) break;
          ix[static_cast<size_t>(t)] = 0;
        }
      }
      break;
    }
  }
  check_points(A);
  return A;
}

PointSet points_from_csv(std::istream& in, int d) {
  if (d < 1) throw std::invalid_argument("points_from_csv: need d >= 1");
  PointSet A;
  A.d = d;
  A.generator = "file";
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Rational> p;
    size_t start = 0;
    while (start <= line.size()) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      std::string_view field(line.data() + start, comma - start);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      p.push_back(parse_coordinate(field));
      start = comma + 1;
    }
    if (static_cast<int>(p.size()) != d) {
      throw std::invalid_argument("points_from_csv: row has " +
                                  std::to_string(p.size()) +
                                  " fields, expected " + std::to_string(d));
    }
    A.points.push_back(std::move(p));
  }
  check_points(A);
  return A;
}

void write_points_csv(std::ostream& out, const PointSet& A) {
  for (const auto& p : A.points) {
    for (size_t t = 0; t < p.size(); ++t) {
      if (t) out << ',';
      out << p[t].str();
    }
    out << '\n';
  }
}

Rational d_eval(const PointSet& A, std::span<const Rational> x) {
  if (static_cast<int>(x.size()) != A.d) {
    throw std::invalid_argument("d_eval: dimension mismatch");
  }
  Rational vol(1);
  for (const Rational& c : x) {
    if (c.sign() < 0 || c > Rational(1)) {
      throw std::domain_error("d_eval: point outside [0,1]^d");
    }
    vol *= c;
  }
  int64_t count = 0;
  for (const auto& p : A.points) {
    bool inside = true;
    for (size_t t = 0; t < p.size(); ++t) {
      if (!(p[t] < x[t])) {
        inside = false;
        break;
      }
    }
    if (inside) ++count;
  }
  return Rational(count) - Rational(A.size()) * vol;
}

Rational linear_haar_factor(const DyadicInterval& I) {
  return Rational::dyadic(2 * I.level + 2);
}

Rational counting_haar_factor(const Rational& a, const DyadicInterval& I) {
  const Rational left = I.left();
  if (a <= left) return Rational(0);
  const Rational right = I.right();
  if (a >= right) return Rational(0);
  if (a <= I.midpoint()) return a - left;
  return right - a;
}

Rational haar_coeff_D(const PointSet& A, const DyadicRectangle& R) {
  if (R.dim() != A.d) {
    throw std::invalid_argument("haar_coeff_D: dimension mismatch");
  }
  detail::Rat128 acc;
  for (const auto& p : A.points) {
    Rational prod(1);
    bool zero = false;
    for (int t = 0; t < A.d; ++t) {
      const Rational c =
          counting_haar_factor(p[static_cast<size_t>(t)],
                               R.sides[static_cast<size_t>(t)]);
      if (c.is_zero()) {
        zero = true;
        break;
      }
      prod *= c;
    }
    if (!zero) acc.add(prod);
  }
  Rational lin(1);
  for (const auto& I : R.sides) lin *= linear_haar_factor(I);
  return acc.to_rational() - Rational(A.size()) * lin;
}

Rational roth_l2_lower_sq(const PointSet& A, int n) {
  const int64_t N = A.size();
  if (n < 1 || n > 29 || N > (int64_t{1} << (n - 1))) {
    throw std::invalid_argument("roth_l2_lower: requires 2N <= 2^n");
  }
  const Rational lc = layer_linear_term(N, n, A.d);
  const int64_t rects_per_shape = int64_t{1} << n;
  const Rational scale(rects_per_shape);  // 1 / |R| for the whole layer
  detail::Rat128 total;
  for (const ShapeVector& r : enumerate_shapes(n, A.d)) {
    const auto cnt = counting_sums(A, r);
    // sum_R (cnt(R) - lc)^2 over the 2^n rectangles of this shape, with
    // cnt(R) = 0 off the recorded support.
    detail::Rat128 shape_sum;
    for (const auto& entry : cnt) {
      const Rational dv = entry.second - lc;
      shape_sum.add(dv * dv - lc * lc);
    }
    shape_sum.add(Rational(rects_per_shape) * lc * lc);
    total.add(shape_sum.to_rational() * scale);
  }
  return total.to_rational();
}

double roth_l2_lower(const PointSet& A, int n) {
  return std::sqrt(roth_l2_lower_sq(A, n).to_double());
}

double sampled_sup_abs(const PointSet& A, int64_t samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("sampled_sup_abs: samples >= 1");
  const int d = A.d;
  const int64_t N = A.size();
  std::vector<double> coords;
  coords.reserve(static_cast<size_t>(N * d));
  for (const auto& p : A.points) {
    for (const Rational& c : p) coords.push_back(c.to_double());
  }
  std::mt19937_64 rng(seed);
  std::vector<double> x(static_cast<size_t>(d));
  double best = 0.0;
  for (int64_t s = 0; s < samples; ++s) {
    double vol = 1.0;
    for (int t = 0; t < d; ++t) {
      x[static_cast<size_t>(t)] =
          static_cast<double>(rng() >> 11) * 0x1.0p-53;
      vol *= x[static_cast<size_t>(t)];
    }
    int64_t cnt = 0;
    const double* p = coords.data();
    for (int64_t i = 0; i < N; ++i, p += d) {
      bool inside = true;
      for (int t = 0; t < d; ++t) {
        if (!(p[t] < x[static_cast<size_t>(t)])) {
          inside = false;
          break;
        }
      }
      if (inside) ++cnt;
    }
    best = std::max(best, std::fabs(static_cast<double>(cnt) -
                                    static_cast<double>(N) * vol));
  }
  return best;
}

namespace {

// Exact pairing <D_N, g> for a piecewise-constant g:
//   <D_N, g> = sum_p int_{(p,1]} g  -  N * <prod_t x_t, g>.
// Box integrals come from a corner table S[k] = int over [corner(k), 1) of g
// (multilinear interpolation between corners is exact for box corners inside
// a cell); the linear moment is a closed form per cell.
Rational pairing_with_grid(const PointSet& A, const ExactGrid& g) {
  const ShapeVector& m = g.resolution();
  const int d = g.dim();
  std::vector<int64_t> nd(static_cast<size_t>(d));
  std::vector<int64_t> stride(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) {
    nd[static_cast<size_t>(t)] = (int64_t{1} << m[static_cast<size_t>(t)]) + 1;
  }
  stride[static_cast<size_t>(d - 1)] = 1;
  for (int t = d - 2; t >= 0; --t) {
    stride[static_cast<size_t>(t)] =
        stride[static_cast<size_t>(t + 1)] * nd[static_cast<size_t>(t + 1)];
  }
  const int64_t corner_total = stride[0] * nd[0];

  std::vector<Rational> S(static_cast<size_t>(corner_total));
  const Rational vol = g.cell_volume();
  {
    std::vector<int64_t> ix(static_cast<size_t>(d), 0);
    int64_t corner = 0;
    const int64_t cells = g.size();
    for (int64_t c = 0; c < cells; ++c) {
      S[static_cast<size_t>(corner)] = g.at(c) * vol;
      for (int t = d - 1; t >= 0; --t) {
        auto& i = ix[static_cast<size_t>(t)];
        corner += stride[static_cast<size_t>(t)];
        if (++i < nd[static_cast<size_t>(t)] - 1) break;
        corner -= i * stride[static_cast<size_t>(t)];
        i = 0;
      }
    }
  }
  for (int t = 0; t < d; ++t) {
    const int64_t st = stride[static_cast<size_t>(t)];
    const int64_t width = nd[static_cast<size_t>(t)];
    for (int64_t i = corner_total - 1; i >= 0; --i) {
      const int64_t k = (i / st) % width;
      if (k + 1 < width) {
        S[static_cast<size_t>(i)] += S[static_cast<size_t>(i + st)];
      }
    }
  }

  detail::Rat128 counting;
  std::vector<int64_t> j(static_cast<size_t>(d));
  std::vector<Rational> theta(static_cast<size_t>(d));
  for (const auto& p : A.points) {
    for (int t = 0; t < d; ++t) {
      const Rational scaled =
          p[static_cast<size_t>(t)] *
          Rational(int64_t{1} << m[static_cast<size_t>(t)]);
      j[static_cast<size_t>(t)] = scaled.num() / scaled.den();  // floor
      theta[static_cast<size_t>(t)] =
          Rational(j[static_cast<size_t>(t)] + 1) - scaled;
    }
    for (int mask = 0; mask < (1 << d); ++mask) {
      Rational w(1);
      int64_t idx = 0;
      for (int t = 0; t < d; ++t) {
        const int bit = (mask >> t) & 1;
        const Rational& th = theta[static_cast<size_t>(t)];
        w *= bit ? Rational(1) - th : th;
        idx += (j[static_cast<size_t>(t)] + bit) *
               stride[static_cast<size_t>(t)];
      }
      if (!w.is_zero()) counting.add(w * S[static_cast<size_t>(idx)]);
    }
  }

  // <prod_t x_t, g> with the per-cell closed form prod_t (b_t^2 - a_t^2)/2.
  std::vector<std::vector<Rational>> linw(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t) {
    const int mt = m[static_cast<size_t>(t)];
    auto& row = linw[static_cast<size_t>(t)];
    row.reserve(size_t{1} << mt);
    for (int64_t c = 0; c < (int64_t{1} << mt); ++c) {
      row.push_back(Rational(2 * c + 1) * Rational::dyadic(2 * mt + 1));
    }
  }
  detail::Rat128 linear;
  std::vector<Rational> prefix(static_cast<size_t>(d) + 1);
  prefix[0] = Rational(1);
  auto rec = [&](auto&& self, int t, int64_t base) -> void {
    const auto& row = linw[static_cast<size_t>(t)];
    for (int64_t c = 0; c < static_cast<int64_t>(row.size()); ++c) {
      prefix[static_cast<size_t>(t) + 1] =
          prefix[static_cast<size_t>(t)] * row[static_cast<size_t>(c)];
      const int64_t lin =
          (base << m[static_cast<size_t>(t)]) | c;
      if (t == d - 1) {
        linear.add_product(g.at(lin), prefix[static_cast<size_t>(d)]);
      } else {
        self(self, t + 1, lin);
      }
    }
  };
  rec(rec, 0, 0);

  return counting.to_rational() -
         Rational(A.size()) * linear.to_rational();
}

}  // namespace

DiscrepancyCertificate discrepancy_certificate(const PointSet& A,
                                               const RieszParams& params) {
  const int64_t N = A.size();
  const int n = params.n;
  if (params.d != A.d) {
    throw std::invalid_argument("discrepancy_certificate: dimension mismatch");
  }
  if (n < 1 || n > 29 || 2 * N > (int64_t{1} << n) ||
      (int64_t{1} << n) >= 4 * N) {
    throw std::invalid_argument(
        "discrepancy_certificate: requires 2N <= 2^n < 4N");
  }
  if (params.mode != BlockMode::Shifted) {
    throw std::invalid_argument(
        "discrepancy_certificate: shifted blocks required");
  }
  (void)params.exact_rho_tilde();  // exact mode: a surrogate must be set

  // Pairing-maximizing signs eps_R = sgn<D_N, h_R> on the block shapes.
  CoefficientField coeffs(n, A.d);
  const Rational lc = layer_linear_term(N, n, A.d);
  for (int t = 1; t <= params.q; ++t) {
    for (const ShapeVector& r : block_shapes(params, t)) {
      const auto cnt = counting_sums(A, r);
      const auto rects = rectangles_of_shape(r);
      for (int64_t idx = 0; idx < static_cast<int64_t>(rects.size()); ++idx) {
        auto it = cnt.find(idx);
        const Rational coeff =
            (it == cnt.end() ? Rational(0) : it->second) - lc;
        coeffs.set(rects[static_cast<size_t>(idx)],
                   Rational(coeff.sign() < 0 ? -1 : 1));
      }
    }
  }

  const Decomposition dec = decompose(params, coeffs);
  ExactGrid sd = dec.sd_by_order.front();
  for (size_t k = 1; k < dec.sd_by_order.size(); ++k) {
    sd = add(sd, dec.sd_by_order[k]);
  }

  DiscrepancyCertificate out;
  out.N = N;
  out.n = n;
  out.d = A.d;
  out.l1 = norm_lp_pow(sd, 1);
  if (out.l1.is_zero()) {
    throw std::domain_error(
        "discrepancy_certificate: ||Psi_sd||_1 = 0, certificate undefined");
  }
  out.pairing = pairing_with_grid(A, sd);
  out.lower_bound = out.pairing / out.l1;
  out.roth_l2_sq = roth_l2_lower_sq(A, n);
  out.roth_l2 = std::sqrt(out.roth_l2_sq.to_double());
  return out;
}

}  // namespace hyperhaar
