#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "doctest.h"

using nlohmann::json;
namespace cli = cglwaves::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
  json parsed() const { return json::parse(out); }
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"cglwaves"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double real_of(const json& j) { return j.is_object() ? j.at("re").get<double>() : j.get<double>(); }

struct EnvGuard {
  explicit EnvGuard(const char* value) { setenv("CGLWAVES_PRECISION", value, 1); }
  ~EnvGuard() { unsetenv("CGLWAVES_PRECISION"); }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"reduce", "--no-such-flag", "1"}).code == cli::kUsage);
  CHECK(run({"laurent", "--equation", "cgl7"}).code == cli::kUsage);
  CHECK(run({"laurent", "--terms", "1"}).code == cli::kUsage);
  CHECK(run({"verify", "--samples", "0"}).code == cli::kUsage);
  CHECK(run({"reduce", "--p-re", "abc"}).code == cli::kUsage);
  Result r = run({"verify", "--samples", "0"});
  CHECK(r.out.empty());
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("help exits with 0") {
  Result r = run({"--help"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("verify") != std::string::npos);
  CHECK(run({"verify", "--help"}).code == cli::kOk);
}

TEST_CASE("numerical failures exit with 3") {
  Result r = run({"landen-check", "--g2", "0", "--g3", "0"});
  CHECK(r.code == cli::kNumerical);
  CHECK(r.err.find("DegenerateLattice") != std::string::npos);
  CHECK(run({"landen-check", "--g2", "1", "--g3", "0", "--e1", "7"}).code == cli::kNumerical);
  CHECK(run({"reduce", "--p-re", "0"}).code != cli::kOk);
}

TEST_CASE("failed checks exit with 1") {
  // Two roots closer than 1e-5: the Landen relations lose far more than their tolerance.
  Result r = run({"landen-check", "--g2", "3", "--g3", "1.00000000001", "--e1", "-0.5"});
  CHECK(r.code == cli::kVerificationFailed);
  CHECK_FALSE(r.parsed().at("pass").get<bool>());
}

TEST_CASE("reduce") {
  Result r = run({"reduce", "--p-re", "1", "--r-im", "1"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(j.at("command") == "reduce");
  const json& red = j.at("reduced");
  CHECK(red.at("e_i").get<double>() == doctest::Approx(1.0));
  CHECK(red.at("e_r").get<double>() == doctest::Approx(0.0));
  CHECK(red.at("s_r").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("verify on the reference slice") {
  Result a = run({"verify", "--ex", "1", "--ey", "1", "--ei", "2", "--samples", "100", "--seed", "7"});
  REQUIRE(a.code == cli::kOk);
  json j = a.parsed();
  CHECK(j.at("overall").get<bool>());
  CHECK(j.at("records").size() > 10);
  for (const auto& rec : j.at("records")) {
    CHECK(rec.at("pass").get<bool>());
    CHECK_FALSE(rec.contains("runtime_ms"));
  }
  Result b = run({"verify", "--ex", "1", "--ey", "1", "--ei", "2", "--samples", "100", "--seed", "7"});
  CHECK(a.out == b.out);

  Result csv = run({"verify", "--samples", "20", "--format", "csv"});
  CHECK(csv.code == cli::kOk);
  CHECK(csv.out.rfind("name,max_residual,tolerance,pass,samples,skipped\n", 0) == 0);

  Result table = run({"verify", "--samples", "20", "--table"});
  CHECK(table.code == cli::kOk);
  CHECK(table.err.find("ode.system.first") != std::string::npos);
}

TEST_CASE("subeq-fit recovers the quartic subequation") {
  Result r = run({"subeq-fit", "--ex", "1", "--ey", "1", "--ei", "2", "--digits", "60"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(j.at("nullity") == 1);
  CHECK(j.at("cols") == 25);
  CHECK(j.at("reference_max_relative_difference").get<double>() < 1e-30);
  // ex = ey = 1, e_i = 2: u^8 and the constant of the expanded polynomial.
  bool seen_top = false, seen_const = false;
  for (const auto& c : j.at("subequation").at("coefficients")) {
    int jj = c.at("j"), k = c.at("k");
    double re = c.at("re");
    if (jj == 8 && k == 0) {
      seen_top = true;
      CHECK(re == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
    }
    if (jj == 0 && k == 0) {
      seen_const = true;
      CHECK(re == doctest::Approx(72900.0).epsilon(1e-12));
    }
    if (jj == 0 && k == 4) CHECK(re == doctest::Approx(1.0));
  }
  CHECK(seen_top);
  CHECK(seen_const);
}

TEST_CASE("subeq-fit off the slice has no subequation") {
  Result r = run({"subeq-fit", "--er", "0.3", "--ei", "1", "--dr", "0.2", "--di", "0.5", "--gr", "1", "--gi",
                  "0.4", "--csi", "0.7"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(j.at("nullity") == 0);
  CHECK(j.at("subequation").is_null());
}

TEST_CASE("laurent pole families") {
  Result r = run({"laurent", "--equation", "cgl5", "--family", "pole", "--terms", "32"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  const json& fams = j.at("families");
  CHECK(fams.size() == 4);
  for (const auto& f : fams) {
    CHECK(f.at("leading_exponent") == -1);
    CHECK(f.at("M").size() == 32);
    CHECK(f.at("series_residual").get<double>() < 1e-25);
    CHECK(f.at("fuchs_indices").size() == 4);
    // Residue of M squared is 2α/e_i; e_i = 2 on the default slice.
    std::complex<double> m0(f.at("m0").at("re").get<double>(), f.at("m0").at("im").get<double>());
    double alpha = f.at("alpha");
    CHECK(std::abs(m0 * m0 - alpha) < 1e-12);
    CHECK(std::stod(f.at("M")[0].at("re").get<std::string>()) == doctest::Approx(m0.real()).epsilon(1e-14));
  }

  Result zero = run({"laurent", "--family", "zero", "--terms", "12"});
  CHECK(zero.code == cli::kOk);
  CHECK(zero.parsed().at("family") == "zero");
}

TEST_CASE("eval columns and rows") {
  Result r = run({"eval", "--points", "5", "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  std::vector<std::string> cols = j.at("columns");
  CHECK(cols == std::vector<std::string>{"xi_re", "xi_im", "M_re", "M_im", "psi_re", "psi_im", "dlogA_re",
                                         "dlogA_im", "res_system1", "res_system2", "res_order3", "res_subeq"});
  REQUIRE(j.at("rows").size() == 5);
  for (const auto& row : j.at("rows")) {
    REQUIRE(row.size() == cols.size());
    for (size_t c = 8; c < cols.size(); ++c) CHECK(row[c].get<double>() < 1e-8);
  }
  // One real period: the first and last points agree.
  const json &first = j.at("rows").front(), &last = j.at("rows").back();
  for (size_t c = 2; c < 8; ++c) CHECK(first[c].get<double>() == doctest::Approx(last[c].get<double>()));

  Result csv = run({"eval", "--points", "3"});
  REQUIRE(csv.code == cli::kOk);
  std::istringstream lines(csv.out);
  std::string header, line;
  std::getline(lines, header);
  CHECK(header == "xi_re,xi_im,M_re,M_im,psi_re,psi_im,dlogA_re,dlogA_im,res_system1,res_system2,"
                  "res_order3,res_subeq");
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 3);
}

TEST_CASE("affixes") {
  Result r = run({"affixes", "--ex", "1", "--ey", "1", "--ei", "2"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(real_of(j.at("lower_lattice").at("g2")) == doctest::Approx(-72.0));
  CHECK(real_of(j.at("lower_lattice").at("g3")) == doctest::Approx(76.0));
}

TEST_CASE("landen-check on the canonical pair") {
  Result r = run({"landen-check", "--random", "5"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(j.at("pass").get<bool>());
  const json& ii = j.at("integer_identity");
  CHECK(ii.at("polynomial_1") == 0);
  CHECK(ii.at("polynomial_2") == 0);
  CHECK(j.at("random").at("count") == 5);
}

TEST_CASE("config file values yield to flags") {
  std::string path = "test_cli_config.txt";
  {
    std::ofstream f(path);
    f << "# slice\nex = 1\ney = 1\nei = 2\ndigits = 40\nterms = 6\n";
  }
  Result r = run({"laurent", "--config", path.c_str(), "--terms", "9"});
  REQUIRE(r.code == cli::kOk);
  json j = r.parsed();
  CHECK(j.at("terms") == 9);
  CHECK(j.at("digits") == 40);
  CHECK(j.at("parameters").at("e_i").get<double>() == doctest::Approx(2.0));

  {
    std::ofstream f(path);
    f << "ex 1\n";
  }
  CHECK(run({"laurent", "--config", path.c_str()}).code == cli::kUsage);
  CHECK(run({"laurent", "--config", "no/such/file"}).code == cli::kUsage);
  std::remove(path.c_str());
}

TEST_CASE("precision from the environment") {
  {
    EnvGuard env("45");
    Result r = run({"laurent", "--terms", "4"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.parsed().at("digits") == 45);
    Result flag = run({"laurent", "--terms", "4", "--digits", "50"});
    CHECK(flag.parsed().at("digits") == 50);
  }
  {
    EnvGuard env("10");
    CHECK(run({"laurent", "--terms", "4"}).code == cli::kUsage);
  }
  {
    EnvGuard env("sixty");
    CHECK(run({"laurent", "--terms", "4"}).code == cli::kUsage);
  }
}

TEST_CASE("output file") {
  std::string path = "test_cli_out.json";
  Result r = run({"reduce", "--p-re", "1", "--r-im", "1", "--output", path.c_str()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  json j = json::parse(in);
  CHECK(j.at("command") == "reduce");
  std::remove(path.c_str());
}
