// Command-line driver: runs the library's experiments from a declarative
// configuration and writes machine-readable reports (JSON by default, CSV
// for tables).  One run per process; no state is shared across runs.
//
// Exit codes:
//   0  success (all self-checks passed)
//   1  usage error or bad configuration
//   2  capacity, budget, or arithmetic-range exceeded
//   3  invariant failure (a verified identity did not hold)

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/discrepancy.hpp"
#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/errors.hpp"
#include "hyperhaar/graphs.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/io.hpp"
#include "hyperhaar/rational.hpp"
#include "hyperhaar/riesz.hpp"

namespace {

using hyperhaar::BlockMode;
using hyperhaar::CoefficientField;
using hyperhaar::ExactGrid;
using hyperhaar::Rational;
using hyperhaar::RieszParams;
using json = nlohmann::ordered_json;

struct CliConfig {
  std::string subcommand;
  int d = 0;
  int n = 0;
  std::vector<int> ns;     // beckgain level ladder
  std::vector<int> ps;     // beckgain moment orders
  std::optional<int> q;
  std::string a = "1/2";
  std::string eps;         // empty: library default 1/d^2
  uint64_t seed = 0;
  std::string mode = "exact";
  std::string coeff = "ones";  // ones | random | exhaustive | file:<path>
  std::string blocks = "partition";
  std::string rho_surrogate;   // empty: derived dyadic stand-in
  std::string out;             // empty: stdout
  std::string format = "json";
  bool inject_fault = false;
  // discrepancy only
  std::string generator = "van_der_corput";
  std::string points_file;
  int64_t npoints = 16;
  int64_t samples = 100000;
};

int threads_cap() {
  const char* env = std::getenv("HYPERHAAR_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

bool exact_mode(const CliConfig& cfg) { return cfg.mode == "exact"; }

// Rational -> JSON: exact mode keeps the "p/q" string, float mode a number.
json rat_json(const Rational& r, bool exact) {
  if (exact) return r.str();
  return r.to_double();
}

// Dense grids hold one value per cell across all axes; reject configurations
// whose cell count cannot fit the library budget before any work happens.
void capacity_precheck(int n, int d) {
  if (static_cast<int64_t>(n) * d > hyperhaar::kMaxGridBits) {
    throw hyperhaar::CapacityError(
        "configuration needs n*d = " + std::to_string(n * d) +
        " grid bits per dense function (limit " +
        std::to_string(hyperhaar::kMaxGridBits) + ")");
  }
}

// Exact stand-in for the analytic normalization rho~ = a q^{1/4} n^{-(d-1)/2}:
// the nearest 64th, clamped into (0, 1].  Deterministic in the parameters.
Rational derived_surrogate(const RieszParams& params) {
  long num = std::lround(params.rho_tilde * 64.0);
  if (num < 1) num = 1;
  if (num > 64) num = 64;
  return Rational(num, 64);
}

RieszParams resolve_params(const CliConfig& cfg, int d, int n) {
  std::optional<Rational> surrogate;
  if (!cfg.rho_surrogate.empty()) {
    surrogate = Rational::parse(cfg.rho_surrogate);
  }
  std::optional<Rational> eps;
  if (!cfg.eps.empty()) eps = Rational::parse(cfg.eps);
  BlockMode mode = cfg.blocks == "shifted" ? BlockMode::Shifted
                                           : BlockMode::Partition;
  RieszParams params = hyperhaar::derive_params(
      d, n, cfg.q, mode, surrogate, Rational::parse(cfg.a), eps);
  if (!params.rho_surrogate.has_value()) {
    params.rho_surrogate = derived_surrogate(params);
  }
  return params;
}

CoefficientField resolve_coeffs(const CliConfig& cfg, int n, int d) {
  if (cfg.coeff == "ones") return CoefficientField::ones(n, d);
  if (cfg.coeff == "random") {
    return CoefficientField::random_rational(n, d, cfg.seed);
  }
  if (cfg.coeff.rfind("file:", 0) == 0) {
    const std::string path = cfg.coeff.substr(5);
    std::ifstream in(path);
    if (!in) {
      throw std::invalid_argument("cannot open coefficient file: " + path);
    }
    return CoefficientField::from_csv(in, n, d);
  }
  throw std::invalid_argument(
      "unsupported coefficient source for this subcommand: " + cfg.coeff);
}

json params_json(const RieszParams& p, bool exact) {
  json j;
  j["d"] = p.d;
  j["n"] = p.n;
  j["q"] = p.q;
  j["q_requested"] = p.q_requested;
  j["a"] = rat_json(p.a, exact);
  j["b"] = rat_json(p.b, exact);
  j["eps"] = rat_json(p.eps, exact);
  j["blocks_mode"] =
      p.mode == BlockMode::Partition ? "partition" : "shifted";
  json blocks = json::array();
  for (const auto& [lo, hi] : p.blocks) blocks.push_back({lo, hi});
  j["blocks"] = blocks;
  j["rho"] = p.rho;
  j["rho_tilde"] = p.rho_tilde;
  j["rho_surrogate"] = rat_json(*p.rho_surrogate, exact);
  return j;
}

json config_json(const CliConfig& cfg) {
  json c;
  c["subcommand"] = cfg.subcommand;
  c["d"] = cfg.d;
  if (cfg.subcommand == "beckgain") {
    c["n"] = cfg.ns;
    c["p"] = cfg.ps;
  } else {
    c["n"] = cfg.n;
  }
  c["q"] = cfg.q.has_value() ? json(*cfg.q) : json(nullptr);
  c["a"] = cfg.a;
  c["eps"] = cfg.eps.empty() ? json(nullptr) : json(cfg.eps);
  c["seed"] = cfg.seed;
  c["mode"] = cfg.mode;
  c["coeff"] = cfg.coeff;
  c["blocks"] = cfg.blocks;
  c["rho_surrogate"] =
      cfg.rho_surrogate.empty() ? json(nullptr) : json(cfg.rho_surrogate);
  if (cfg.subcommand == "discrepancy") {
    c["generator"] = cfg.generator;
    c["N"] = cfg.npoints;
    c["points"] = cfg.points_file.empty() ? json(nullptr)
                                          : json(cfg.points_file);
    c["samples"] = cfg.samples;
  }
  c["out"] = cfg.out.empty() ? "-" : cfg.out;
  c["format"] = cfg.format;
  c["threads"] = threads_cap();
  return c;
}

// Overwrite the echoed config with values that were derived rather than given.
void record_resolved(json& report, const RieszParams& params, bool exact) {
  report["config"]["q"] = params.q;
  report["config"]["eps"] = rat_json(params.eps, exact);
  report["config"]["rho_surrogate"] = rat_json(*params.rho_surrogate, exact);
  report["params"] = params_json(params, exact);
}

json report_skeleton(const CliConfig& cfg) {
  json report;
  report["schema"] = "1";
  report["version"] = hyperhaar::kVersion;
  report["config"] = config_json(cfg);
  return report;
}

void emit(const CliConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) {
    throw std::invalid_argument("cannot open output path: " + cfg.out);
  }
  f << text;
}

int finish(const CliConfig& cfg, json& report, bool ok) {
  if (cfg.inject_fault) {
    report["fault_injected"] = true;
    ok = false;
  }
  report["ok"] = ok;
  emit(cfg, report.dump(2) + "\n");
  return ok ? 0 : 3;
}

const char* form_name(hyperhaar::InequalityForm form) {
  switch (form) {
    case hyperhaar::InequalityForm::Average: return "average";
    case hyperhaar::InequalityForm::Conjecture: return "conjecture";
    case hyperhaar::InequalityForm::Main: return "main";
    case hyperhaar::InequalityForm::TalagrandD2: return "talagrand_d2";
  }
  return "unknown";
}

// All sign patterns on the twelve level-2 layer rectangles in dimension 2:
// the exhaustive floor of sup / (2^{-n} sum |alpha|) over the layer.
struct ExhaustiveResult {
  json payload;
  Rational min_sup;
};

ExhaustiveResult exhaustive_sweep(bool exact) {
  std::vector<hyperhaar::DyadicRectangle> rects;
  for (const auto& shape : hyperhaar::enumerate_shapes(2, 2)) {
    for (const auto& R : hyperhaar::rectangles_of_shape(shape)) {
      rects.push_back(R);
    }
  }
  const uint32_t patterns = uint32_t{1} << rects.size();
  std::optional<Rational> min_sup;
  uint32_t argmin = 0;
  for (uint32_t mask = 0; mask < patterns; ++mask) {
    CoefficientField field(2, 2);
    for (size_t i = 0; i < rects.size(); ++i) {
      field.set(rects[i],
                ((mask >> i) & 1u) != 0 ? Rational(-1) : Rational(1));
    }
    Rational sup = hyperhaar::norm_inf(hyperhaar::hyperbolic_sum(field, true));
    if (!min_sup.has_value() || sup < *min_sup) {
      min_sup = sup;
      argmin = mask;
    }
  }
  const Rational lhs =
      Rational::dyadic(2) * Rational(static_cast<int64_t>(rects.size()));
  std::string argmin_signs;
  json rect_names = json::array();
  for (size_t i = 0; i < rects.size(); ++i) {
    rect_names.push_back(hyperhaar::format_rectangle(rects[i]));
    argmin_signs += ((argmin >> i) & 1u) != 0 ? '-' : '+';
  }
  json payload;
  payload["rectangles"] = rect_names;
  payload["patterns"] = patterns;
  payload["lhs"] = rat_json(lhs, exact);
  payload["min_sup"] = rat_json(*min_sup, exact);
  payload["min_ratio"] = rat_json(*min_sup / lhs, exact);
  payload["argmin_pattern"] = argmin;
  payload["argmin_signs"] = argmin_signs;
  return {std::move(payload), *min_sup};
}

int run_verify(CliConfig& cfg) {
  capacity_precheck(cfg.n, cfg.d);
  const bool exact = exact_mode(cfg);
  json report = report_skeleton(cfg);

  if (cfg.coeff == "exhaustive") {
    if (cfg.d != 2 || cfg.n != 2) {
      throw std::invalid_argument(
          "--coeff exhaustive is defined for --d 2 --n 2 only");
    }
    ExhaustiveResult sweep = exhaustive_sweep(exact);
    report["exhaustive"] = std::move(sweep.payload);
    return finish(cfg, report, sweep.min_sup.sign() > 0);
  }

  CoefficientField coeffs = resolve_coeffs(cfg, cfg.n, cfg.d);

  std::vector<hyperhaar::InequalityForm> forms = {
      hyperhaar::InequalityForm::Average,
      hyperhaar::InequalityForm::Conjecture,
      hyperhaar::InequalityForm::Main,
  };
  if (cfg.d == 2) forms.push_back(hyperhaar::InequalityForm::TalagrandD2);

  bool ok = true;
  json form_reports = json::array();
  for (auto form : forms) {
    hyperhaar::InequalityReport r = hyperhaar::verify_inequality(coeffs, form);
    json f;
    f["form"] = form_name(form);
    f["lhs"] = rat_json(r.lhs, exact);
    f["sup"] = rat_json(r.sup, exact);
    f["power"] = r.power;
    f["rhs"] = r.rhs;
    f["ratio"] = r.ratio;
    f["asserted"] = r.asserted;
    f["holds"] = r.holds;
    form_reports.push_back(std::move(f));
    if (r.asserted && !r.holds) ok = false;
  }
  report["forms"] = std::move(form_reports);

  RieszParams params = resolve_params(cfg, cfg.d, cfg.n);
  record_resolved(report, params, exact);

  hyperhaar::DualityCertificate cert =
      hyperhaar::duality_certificate(coeffs, params);
  const Rational layer_sup =
      hyperhaar::norm_inf(hyperhaar::hyperbolic_sum(coeffs, false));
  const bool bound_ok = !(layer_sup < cert.lower_bound);
  json c;
  c["pairing"] = rat_json(cert.pairing, exact);
  c["l1"] = rat_json(cert.l1, exact);
  c["lower_bound"] = rat_json(cert.lower_bound, exact);
  c["covered_mass"] = rat_json(cert.covered_mass, exact);
  c["full_mass"] = rat_json(cert.full_mass, exact);
  c["order1_pairing"] = rat_json(cert.order1_pairing, exact);
  c["layer_sup"] = rat_json(layer_sup, exact);
  c["bound_holds"] = bound_ok;
  report["certificate"] = std::move(c);

  return finish(cfg, report, ok && bound_ok);
}

int run_riesz(CliConfig& cfg) {
  capacity_precheck(cfg.n, cfg.d);
  const bool exact = exact_mode(cfg);
  json report = report_skeleton(cfg);

  CoefficientField coeffs = resolve_coeffs(cfg, cfg.n, cfg.d);
  RieszParams params = resolve_params(cfg, cfg.d, cfg.n);
  record_resolved(report, params, exact);

  hyperhaar::Decomposition dec = hyperhaar::decompose(params, coeffs);
  hyperhaar::PsiStats stats = hyperhaar::psi_stats(dec.psi);
  if (cfg.inject_fault) {
    // Mutation hook for the exit-code contract: perturb the computed mean so
    // the self-check below genuinely fails.
    stats.mean = stats.mean + Rational(1, 4);
  }

  const bool mean_ok = stats.mean == Rational(1);
  ExactGrid total(dec.psi.resolution(), Rational(1));
  for (const auto& sd : dec.sd_by_order) total = hyperhaar::add(total, sd);
  total = hyperhaar::add(total, dec.neg);
  const bool split_ok = total == dec.psi;

  json s;
  s["mean"] = rat_json(stats.mean, exact);
  s["l1"] = rat_json(stats.l1, exact);
  s["l2_sq"] = rat_json(stats.l2_sq, exact);
  s["l2"] = stats.l2;
  s["neg_measure"] = rat_json(stats.neg_measure, exact);
  report["psi_stats"] = std::move(s);

  json orders = json::array();
  for (size_t k = 0; k < dec.sd_by_order.size(); ++k) {
    json o;
    o["k"] = k + 1;
    o["l1"] = rat_json(hyperhaar::norm_lp_pow(dec.sd_by_order[k], 1), exact);
    orders.push_back(std::move(o));
  }
  report["sd_orders"] = std::move(orders);
  report["neg_l1"] = rat_json(hyperhaar::norm_lp_pow(dec.neg, 1), exact);

  json identities;
  identities["mean_is_one"] = mean_ok;
  identities["split_exact"] = split_ok;
  report["identities"] = std::move(identities);

  // finish() would double-fail on the injected fault; the mutation above is
  // itself the failure, so report it through the ordinary path.
  const bool ok = mean_ok && split_ok;
  if (cfg.inject_fault) report["fault_injected"] = true;
  report["ok"] = ok;
  emit(cfg, report.dump(2) + "\n");
  return ok ? 0 : 3;
}

json series_json(const hyperhaar::BeckGainSeries& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    json e;
    e["n"] = p.n;
    e["p"] = p.p;
    e["moment"] = p.moment;
    e["norm"] = p.norm;
    pts.push_back(std::move(e));
  }
  json j;
  j["points"] = std::move(pts);
  j["l2_slope"] = s.l2_slope;
  return j;
}

int run_beckgain(CliConfig& cfg) {
  if (cfg.ns.empty()) cfg.ns = {4, 6, 8};
  if (cfg.ps.empty()) cfg.ps = {2};
  for (int n : cfg.ns) {
    if (n < 1) throw std::invalid_argument("beckgain: levels must be >= 1");
  }

  hyperhaar::BeckGainReport rep =
      hyperhaar::beck_gain_experiment(cfg.d, cfg.ns, cfg.ps);
  const size_t rows = rep.measured.points.size() + rep.naive.points.size() +
                      rep.pinned.points.size();
  const bool ok = rows >= 3;

  if (cfg.format == "csv") {
    std::ostringstream table;
    hyperhaar::write_beck_csv(table, rep);
    if (cfg.inject_fault) return 3;
    emit(cfg, table.str());
    return ok ? 0 : 3;
  }

  json report = report_skeleton(cfg);
  report["beckgain"]["d"] = rep.d;
  report["beckgain"]["ns"] = rep.ns;
  report["beckgain"]["ps"] = rep.ps;
  report["beckgain"]["measured"] = series_json(rep.measured);
  report["beckgain"]["naive"] = series_json(rep.naive);
  report["beckgain"]["pinned"] = series_json(rep.pinned);
  report["beckgain"]["gain_gap"] = rep.gain_gap;
  report["rows"] = rows;
  return finish(cfg, report, ok);
}

int run_discrepancy(CliConfig& cfg) {
  const bool exact = exact_mode(cfg);

  hyperhaar::PointSet A;
  if (cfg.generator == "file") {
    if (cfg.points_file.empty()) {
      throw std::invalid_argument(
          "--generator file requires --points <csv path>");
    }
    std::ifstream in(cfg.points_file);
    if (!in) {
      throw std::invalid_argument("cannot open points file: " +
                                  cfg.points_file);
    }
    A = hyperhaar::points_from_csv(in, cfg.d);
  } else {
    hyperhaar::PointKind kind;
    if (cfg.generator == "van_der_corput") {
      kind = hyperhaar::PointKind::VanDerCorput;
    } else if (cfg.generator == "hammersley") {
      kind = hyperhaar::PointKind::Hammersley;
    } else if (cfg.generator == "random") {
      kind = hyperhaar::PointKind::Random;
    } else if (cfg.generator == "grid") {
      kind = hyperhaar::PointKind::Grid;
    } else {
      throw std::invalid_argument("unknown generator: " + cfg.generator);
    }
    A = hyperhaar::generate(kind, cfg.npoints, cfg.d, cfg.seed);
  }
  cfg.npoints = A.size();

  // The certificate layer needs 2N <= 2^n < 4N; the smallest admissible n
  // always satisfies both bounds.
  int n = cfg.n;
  if (n <= 0) {
    n = 1;
    while ((int64_t{1} << n) < 2 * A.size()) ++n;
  }
  cfg.n = n;
  capacity_precheck(n, cfg.d);

  RieszParams params = resolve_params(cfg, cfg.d, n);
  json report = report_skeleton(cfg);
  report["config"]["n"] = n;
  record_resolved(report, params, exact);

  hyperhaar::DiscrepancyCertificate cert =
      hyperhaar::discrepancy_certificate(A, params);
  const double sup_est =
      hyperhaar::sampled_sup_abs(A, cfg.samples, cfg.seed);

  json payload;
  payload["generator"] = A.generator;
  payload["N"] = cert.N;
  payload["n"] = cert.n;
  payload["d"] = cert.d;
  payload["pairing"] = rat_json(cert.pairing, exact);
  payload["l1"] = rat_json(cert.l1, exact);
  payload["lower_bound"] = rat_json(cert.lower_bound, exact);
  payload["roth_l2_sq"] = rat_json(cert.roth_l2_sq, exact);
  payload["roth_l2"] = cert.roth_l2;
  payload["sampled_sup"] = sup_est;
  report["discrepancy"] = std::move(payload);

  const bool ok = cert.roth_l2_sq.sign() >= 0 &&
                  cert.lower_bound * cert.l1 == cert.pairing;
  return finish(cfg, report, ok);
}

void add_common_options(CLI::App* sub, CliConfig& cfg, bool n_required) {
  auto* d = sub->add_option("--d", cfg.d, "dimension (number of axes)")
                ->check(CLI::Range(1, 16));
  d->required();
  auto* n = sub->add_option("--n", cfg.n, "total dyadic level |r| = n")
                ->check(CLI::Range(1, 62));
  if (n_required) n->required();
  sub->add_option("--q", cfg.q, "block count (derived when omitted)")
      ->check(CLI::Range(1, 64));
  sub->add_option("--a", cfg.a, "normalization factor a (rational)")
      ->capture_default_str();
  sub->add_option("--eps", cfg.eps,
                  "block-count exponent (rational; default 1/d^2)");
  sub->add_option("--seed", cfg.seed, "seed for random draws")
      ->capture_default_str();
  sub->add_option("--mode", cfg.mode, "report arithmetic: exact or float")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  sub->add_option("--coeff", cfg.coeff,
                  "coefficient source: ones, random, or file:<csv path>")
      ->capture_default_str();
  sub->add_option("--blocks", cfg.blocks,
                  "block layout: partition or shifted")
      ->check(CLI::IsMember({"partition", "shifted"}))
      ->capture_default_str();
  sub->add_option("--rho-surrogate", cfg.rho_surrogate,
                  "exact rational stand-in for rho~ (derived when omitted)");
  sub->add_option("--out", cfg.out, "output path (default: stdout)");
  sub->add_option("--format", cfg.format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_flag("--inject-fault", cfg.inject_fault,
                "corrupt one verified quantity (tests the exit-code contract)")
      ->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cfg;
  CLI::App app{
      "hyperhaar: exact Haar-tensor experiments on the unit cube\n"
      "Subcommand reports embed the resolved configuration; exit codes are\n"
      "0 success, 1 usage, 2 capacity, 3 invariant failure."};
  app.set_version_flag("--version", std::string(hyperhaar::kVersion));
  app.require_subcommand(1);

  CLI::App* verify = app.add_subcommand(
      "verify", "lower-bound forms and the duality certificate");
  add_common_options(verify, cfg, /*n_required=*/true);
  verify->get_option("--coeff")
      ->description(
          "coefficient source: ones, random, file:<csv path>, or "
          "exhaustive (all sign patterns; --d 2 --n 2 only)");

  CLI::App* riesz = app.add_subcommand(
      "riesz", "product test function: statistics and exact decomposition");
  add_common_options(riesz, cfg, /*n_required=*/true);

  CLI::App* beckgain = app.add_subcommand(
      "beckgain", "coincidence-sum growth: measured vs naive slopes");
  beckgain->add_option("--d", cfg.d, "dimension (number of axes)")
      ->check(CLI::Range(2, 16))
      ->required();
  beckgain->add_option("--n", cfg.ns,
                       "levels of the ladder (repeatable; default 4 6 8)")
      ->check(CLI::Range(1, 62));
  beckgain->add_option("--p", cfg.ps,
                       "even moment orders (repeatable; default 2)")
      ->check(CLI::Range(2, 16));
  beckgain->add_option("--seed", cfg.seed, "seed (echoed; signs are canonical)")
      ->capture_default_str();
  beckgain->add_option("--mode", cfg.mode, "report arithmetic: exact or float")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  beckgain->add_option("--out", cfg.out, "output path (default: stdout)");
  beckgain->add_option("--format", cfg.format,
                       "table format: csv (default) or json")
      ->check(CLI::IsMember({"json", "csv"}));
  beckgain->add_flag("--inject-fault", cfg.inject_fault,
                     "force a failing run (tests the exit-code contract)")
      ->group("");

  CLI::App* discrepancy = app.add_subcommand(
      "discrepancy", "point-set discrepancy bounds and certificate");
  add_common_options(discrepancy, cfg, /*n_required=*/false);
  discrepancy->get_option("--d")->required(false);
  discrepancy->add_option(
      "--generator", cfg.generator,
      "point set: van_der_corput, hammersley, random, grid, or file")
      ->check(CLI::IsMember(
          {"van_der_corput", "hammersley", "random", "grid", "file"}))
      ->capture_default_str();
  discrepancy->add_option("--N", cfg.npoints, "number of points")
      ->check(CLI::Range(int64_t{1}, int64_t{1} << 40))
      ->capture_default_str();
  discrepancy->add_option("--points", cfg.points_file,
                          "points CSV path (with --generator file)");
  discrepancy->add_option("--samples", cfg.samples,
                          "samples for the numeric sup estimate")
      ->check(CLI::Range(int64_t{1}, int64_t{100000000}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(verify)) {
      cfg.subcommand = "verify";
      return run_verify(cfg);
    }
    if (app.got_subcommand(riesz)) {
      cfg.subcommand = "riesz";
      return run_riesz(cfg);
    }
    if (app.got_subcommand(beckgain)) {
      cfg.subcommand = "beckgain";
      if (beckgain->get_option("--format")->count() == 0) cfg.format = "csv";
      return run_beckgain(cfg);
    }
    cfg.subcommand = "discrepancy";
    if (discrepancy->get_option("--d")->count() == 0) cfg.d = 2;
    if (discrepancy->get_option("--blocks")->count() == 0) {
      cfg.blocks = "shifted";
    }
    return run_discrepancy(cfg);
  } catch (const hyperhaar::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hyperhaar::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hyperhaar::OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
