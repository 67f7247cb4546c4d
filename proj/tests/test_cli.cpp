// Serialization formats and the command-line driver: JSON/CSV encodings
// round-trip exactly, reports carry the documented fields, and the process
// honors the exit-code contract (0 success, 1 usage, 2 capacity,
// 3 invariant failure).

#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hyperhaar/coefficients.hpp"
#include "hyperhaar/discrepancy.hpp"
#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/graphs.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/io.hpp"
#include "hyperhaar/rational.hpp"
#include "hyperhaar/spectrum.hpp"

namespace fs = std::filesystem;
using hyperhaar::CoefficientField;
using hyperhaar::ColoredGraph;
using hyperhaar::ExactGrid;
using hyperhaar::Rational;
using ojson = nlohmann::ordered_json;

namespace {

const fs::path& test_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("hyperhaar_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// Runs the driver binary with `args`, capturing stdout into `out_file`;
// returns the process exit code.
int run_cli(const std::string& args, const fs::path& out_file) {
  const std::string cmd = std::string(HYPERHAAR_CLI_PATH) + " " + args +
                          " > " + out_file.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("grid JSON round trip preserves exact values and resolution") {
  ExactGrid f = ExactGrid::from_values(
      {1, 1}, {Rational(1, 2), Rational(-1, 3), Rational(7), Rational(0)});
  const std::string text = hyperhaar::grid_to_json(f);

  ojson j = ojson::parse(text);
  CHECK(j["mode"].get<std::string>() == "exact");
  CHECK(j["resolution"] == ojson::array({1, 1}));
  CHECK(j["values"][0].get<std::string>() == "1/2");
  CHECK(j["values"][1].get<std::string>() == "-1/3");
  CHECK(j["values"][2].get<std::string>() == "7");
  CHECK(j["values"][3].get<std::string>() == "0");

  ExactGrid g = hyperhaar::grid_from_json(text);
  CHECK(g == f);
}

TEST_CASE("grid JSON rejects wrong mode and malformed fields") {
  CHECK_THROWS_AS(
      hyperhaar::grid_from_json(
          R"({"resolution":[1],"mode":"float","values":["1","2"]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hyperhaar::grid_from_json(R"({"mode":"exact","values":["1"]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hyperhaar::grid_from_json(
          R"({"resolution":[1],"mode":"exact","values":["1"]})"),
      std::invalid_argument);  // value count must be 2^|m|
  CHECK_THROWS_AS(hyperhaar::grid_from_json("not json"),
                  std::exception);
}

TEST_CASE("spectrum CSV: mean row first, then coefficients in map order") {
  // Values [1,2,3,4] on the 2x2 grid: mean 5/2, one pure-axis coefficient
  // per direction, and a vanishing (omitted) mixed coefficient.
  ExactGrid f = ExactGrid::from_values(
      {1, 1}, {Rational(1), Rational(2), Rational(3), Rational(4)});
  auto spec = hyperhaar::haar_analyze(f);
  std::ostringstream out;
  hyperhaar::write_spectrum_csv(out, spec);
  CHECK(out.str() ==
        "mean,5/2\n"
        "-1:0,0:0,1/2\n"
        "0:0,-1:0,1\n");
}

TEST_CASE("graph JSON round trip and malformed input") {
  ColoredGraph g;
  g.vertices = {1, 2, 3};
  g.add_edge(2, 1, 2);
  g.add_edge(2, 2, 3);
  g.add_edge(3, 3, 1);  // stored as the ordered pair (1, 3)

  const std::string text = hyperhaar::graph_to_json(g);
  ColoredGraph h = hyperhaar::graph_from_json(text);
  CHECK(h.vertices == g.vertices);
  CHECK(h.edges == g.edges);

  ojson j = ojson::parse(text);
  CHECK(j["edges"]["3"][0] == ojson::array({1, 3}));

  CHECK_THROWS_AS(hyperhaar::graph_from_json(
                      R"({"vertices":[1,2],"edges":{"2":[[1]]}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(hyperhaar::graph_from_json(
                      R"({"vertices":[1,2],"edges":{"x":[[1,2]]}})"),
                  std::invalid_argument);
}

TEST_CASE("coincidence-growth CSV has the documented header and row shape") {
  auto report = hyperhaar::beck_gain_experiment(3, {2, 3}, {2});
  std::ostringstream out;
  hyperhaar::write_beck_csv(out, report);
  auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 7);  // header + measured 2 + naive 2 + pinned 2
  CHECK(lines[0] == "d,n,p,norm,slope");
  for (size_t i = 1; i < lines.size(); ++i) {
    CAPTURE(lines[i]);
    size_t commas = 0;
    for (char ch : lines[i]) commas += ch == ',' ? 1 : 0;
    CHECK(commas == 4);
    CHECK(lines[i].rfind("3,", 0) == 0);  // d column
  }
}

TEST_CASE("cli: version flag prints the library version") {
  const fs::path out = test_dir() / "version.txt";
  CHECK(run_cli("--version", out) == 0);
  CHECK(slurp(out) == std::string(hyperhaar::kVersion) + "\n");
}

TEST_CASE("cli: usage problems exit 1") {
  const fs::path out = test_dir() / "usage.txt";
  CHECK(run_cli("verify --n 2", out) == 1);                // missing --d
  CHECK(run_cli("riesz --d 2 --n 3 --mode bogus", out) == 1);
  CHECK(run_cli("unknown-subcommand", out) == 1);
  CHECK(run_cli("verify --d 2 --n 3 --coeff exhaustive", out) == 1);
  CHECK(run_cli("verify --d 2 --n 3 --coeff file:/no/such/file.csv", out)
        == 1);
  CHECK(run_cli("discrepancy --generator file", out) == 1);  // no --points
}

TEST_CASE("cli: oversized dense grids exit 2 before any work") {
  const fs::path out = test_dir() / "capacity.txt";
  CHECK(run_cli("riesz --d 9 --n 3", out) == 2);
  CHECK(run_cli("verify --d 4 --n 7", out) == 2);
}

TEST_CASE("cli: injected fault fails the self-check and exits 3") {
  const fs::path out = test_dir() / "fault.json";
  CHECK(run_cli("riesz --d 2 --n 3 --rho-surrogate 1/4 --inject-fault", out)
        == 3);
  ojson j = ojson::parse(slurp(out));
  CHECK(j["fault_injected"].get<bool>() == true);
  CHECK(j["identities"]["mean_is_one"].get<bool>() == false);
  CHECK(j["ok"].get<bool>() == false);
}

TEST_CASE("cli: riesz exact report carries the identities and mean \"1\"") {
  const fs::path out = test_dir() / "riesz.json";
  CHECK(run_cli("riesz --d 2 --n 4 --q 2 --coeff random --seed 11 "
                "--rho-surrogate 1/4",
                out) == 0);
  ojson j = ojson::parse(slurp(out));
  CHECK(j["schema"].get<std::string>() == "1");
  CHECK(j["version"].get<std::string>() == hyperhaar::kVersion);
  CHECK(j["config"]["subcommand"].get<std::string>() == "riesz");
  CHECK(j["config"]["d"].get<int>() == 2);
  CHECK(j["config"]["q"].get<int>() == 2);
  CHECK(j["config"]["rho_surrogate"].get<std::string>() == "1/4");
  CHECK(j["params"]["blocks"].size() == 2);
  CHECK(j["psi_stats"]["mean"].get<std::string>() == "1");
  CHECK(j["identities"]["mean_is_one"].get<bool>() == true);
  CHECK(j["identities"]["split_exact"].get<bool>() == true);
  CHECK(j["ok"].get<bool>() == true);
}

TEST_CASE("cli: riesz float report emits numbers with neg_measure in [0,1]") {
  const fs::path out = test_dir() / "riesz_float.json";
  CHECK(run_cli("riesz --d 2 --n 4 --coeff random --seed 3 --mode float "
                "--rho-surrogate 1/4",
                out) == 0);
  ojson j = ojson::parse(slurp(out));
  CHECK(j["psi_stats"]["mean"].is_number());
  CHECK(j["psi_stats"]["mean"].get<double>() == doctest::Approx(1.0));
  const double neg = j["psi_stats"]["neg_measure"].get<double>();
  CHECK(neg >= 0.0);
  CHECK(neg <= 1.0);
}

TEST_CASE("cli: verify report embeds resolved config and the certificate") {
  const fs::path out = test_dir() / "verify.json";
  CHECK(run_cli("verify --d 2 --n 3 --coeff random --seed 7 "
                "--rho-surrogate 1/4",
                out) == 0);
  ojson j = ojson::parse(slurp(out));
  REQUIRE(j.contains("forms"));
  bool saw_asserted = false;
  bool saw_talagrand = false;
  for (const auto& f : j["forms"]) {
    if (f["asserted"].get<bool>()) {
      saw_asserted = true;
      CHECK(f["holds"].get<bool>() == true);
    }
    if (f["form"].get<std::string>() == "talagrand_d2") saw_talagrand = true;
    CHECK(f.contains("lhs"));
    CHECK(f.contains("sup"));
    CHECK(f.contains("ratio"));
  }
  CHECK(saw_asserted);
  CHECK(saw_talagrand);  // dimension-2 form present exactly when d = 2
  CHECK(j["certificate"]["bound_holds"].get<bool>() == true);
  CHECK(j["config"]["q"].is_number());  // resolved, not the null placeholder
  CHECK(j["ok"].get<bool>() == true);
}

TEST_CASE("cli: identical config and seed reproduce byte-identical reports") {
  const fs::path a = test_dir() / "rerun_a.json";
  const fs::path b = test_dir() / "rerun_b.json";
  const std::string args =
      "verify --d 2 --n 3 --q 2 --coeff random --seed 5 --rho-surrogate 1/4";
  CHECK(run_cli(args, a) == 0);
  CHECK(run_cli(args, b) == 0);
  CHECK(slurp(a) == slurp(b));

  const fs::path c = test_dir() / "rerun_c.json";
  const fs::path d = test_dir() / "rerun_d.json";
  CHECK(run_cli("discrepancy --N 16 --seed 2", c) == 0);
  CHECK(run_cli("discrepancy --N 16 --seed 2", d) == 0);
  CHECK(slurp(c) == slurp(d));
}

TEST_CASE("cli: van der Corput certificate matches the library goldens") {
  const fs::path out = test_dir() / "disc.json";
  CHECK(run_cli("discrepancy --N 16 --q 2 --rho-surrogate 1/4", out) == 0);
  ojson j = ojson::parse(slurp(out));
  const auto& d = j["discrepancy"];
  CHECK(d["generator"].get<std::string>() == "van_der_corput");
  CHECK(d["N"].get<int>() == 16);
  CHECK(d["n"].get<int>() == 5);  // derived: 2N <= 2^n < 4N
  CHECK(d["pairing"].get<std::string>() == "17/512");
  CHECK(d["l1"].get<std::string>() == "3/8");
  CHECK(d["lower_bound"].get<std::string>() == "17/192");
  CHECK(d["roth_l2"].get<double>() >= 0.0);
  CHECK(d["sampled_sup"].get<double>() >=
        Rational(17, 192).to_double());
  CHECK(j["ok"].get<bool>() == true);
}

TEST_CASE("cli: points file input round-trips the certificate") {
  const fs::path csv = test_dir() / "vdc16.csv";
  {
    auto A = hyperhaar::generate(hyperhaar::PointKind::VanDerCorput, 16, 2);
    std::ofstream f(csv);
    hyperhaar::write_points_csv(f, A);
  }
  const fs::path out = test_dir() / "disc_file.json";
  CHECK(run_cli("discrepancy --generator file --points " + csv.string() +
                    " --q 2 --rho-surrogate 1/4",
                out) == 0);
  ojson j = ojson::parse(slurp(out));
  const auto& d = j["discrepancy"];
  CHECK(d["generator"].get<std::string>() == "file");
  CHECK(d["N"].get<int>() == 16);
  CHECK(d["pairing"].get<std::string>() == "17/512");
  CHECK(d["l1"].get<std::string>() == "3/8");
  CHECK(d["lower_bound"].get<std::string>() == "17/192");
}

TEST_CASE("cli: exhaustive sign sweep reports the frozen minimum") {
  const fs::path out = test_dir() / "exhaustive.json";
  CHECK(run_cli("verify --d 2 --n 2 --coeff exhaustive", out) == 0);
  ojson j = ojson::parse(slurp(out));
  const auto& e = j["exhaustive"];
  CHECK(e["patterns"].get<int>() == 4096);
  CHECK(e["rectangles"].size() == 12);
  CHECK(e["lhs"].get<std::string>() == "3");
  CHECK(e["min_sup"].get<std::string>() == "3");
  CHECK(e["min_ratio"].get<std::string>() == "1");
}

TEST_CASE("cli: coincidence-growth table has header and at least 3 rows") {
  const fs::path out = test_dir() / "beck.csv";
  CHECK(run_cli("beckgain --d 3 --n 2 --n 3", out) == 0);
  auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0] == "d,n,p,norm,slope");

  const fs::path jout = test_dir() / "beck.json";
  CHECK(run_cli("beckgain --d 3 --n 2 --n 3 --format json", jout) == 0);
  ojson j = ojson::parse(slurp(jout));
  CHECK(j["beckgain"]["measured"]["points"].size() == 2);
  CHECK(j["rows"].get<int>() >= 3);
}

TEST_CASE("cli: coefficient file input feeds the verify run") {
  const fs::path csv = test_dir() / "coeffs.csv";
  {
    auto field = CoefficientField::random_rational(3, 2, 9);
    std::ofstream f(csv);
    field.write_csv(f);
  }
  const fs::path out = test_dir() / "verify_file.json";
  CHECK(run_cli("verify --d 2 --n 3 --coeff file:" + csv.string() +
                    " --rho-surrogate 1/4",
                out) == 0);
  ojson j = ojson::parse(slurp(out));
  CHECK(j["config"]["coeff"].get<std::string>() ==
        "file:" + csv.string());
  CHECK(j["ok"].get<bool>() == true);
}

TEST_CASE("cli: --out writes the report to the requested path") {
  const fs::path report = test_dir() / "outflag.json";
  const fs::path stdout_capture = test_dir() / "outflag_stdout.txt";
  CHECK(run_cli("riesz --d 2 --n 3 --rho-surrogate 1/4 --out " +
                    report.string(),
                stdout_capture) == 0);
  CHECK(slurp(stdout_capture).empty());
  ojson j = ojson::parse(slurp(report));
  CHECK(j["ok"].get<bool>() == true);
}
