#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "rankone/cli.hpp"
#include "rankone/report.hpp"

using namespace rankone;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::vector<const char*> argv{"rankone"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "rankone_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("complex arguments") {
  CHECK(parse_complex("1,0") == cplx(1, 0));
  CHECK(parse_complex("-0.5,2e-1") == cplx(-0.5, 0.2));
  CHECK(parse_complex("3") == cplx(3, 0));
  CHECK_THROWS_AS(parse_complex("1+2i"), PreconditionError);
  CHECK_THROWS_AS(parse_complex("a,b"), PreconditionError);
  CHECK_THROWS_AS(parse_complex(""), PreconditionError);
}

TEST_CASE("eval prints the value") {
  const Run r = run({"eval", "--integrand", "burkholder", "--p", "3", "--xi", "1,0", "--zeta", "0,0"});
  CHECK(r.rc == 0);
  CHECK(r.out == "1\n");
  const Run f = run({"eval", "--integrand", "beurling_m", "--p", "3", "--M", "2", "--xi", "0,0", "--zeta", "0,1"});
  CHECK(std::stod(f.out) == doctest::Approx(-8.0));
}

TEST_CASE("parameter errors name the constraint") {
  const Run r = run({"eval", "--p", "0.5"});
  CHECK(r.rc == 2);
  CHECK(r.err.find("exponent_range") != std::string::npos);
  CHECK(run({"eval", "--xi", "1+i"}).rc == 2);
  CHECK(run({"frobnicate"}).rc == 2);
  CHECK(run({}).rc == 2);
  CHECK(run({"verify", "--case", "nope"}).rc == 2);
  const Run m = run({"verify", "--case", "m_pointwise", "--p", "3", "--M", "1.5", "-o", (scratch() / "m.json").string()});
  CHECK(m.rc == 2);
  CHECK(m.err.find("M_at_least_pstar_minus_one") != std::string::npos);
}

TEST_CASE("reports are canonical and deterministic") {
  const fs::path a = scratch() / "a.json", b = scratch() / "b.json";
  const std::vector<std::string> base{"verify", "--case", "cross_form", "--p", "3", "--samples", "500", "--seed", "4"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"-o", a.string()});
  args_b.insert(args_b.end(), {"-o", a.string()});
  REQUIRE(run(args_a).rc == 0);
  const std::string first = slurp(a);
  REQUIRE(run(args_b).rc == 0);
  CHECK(slurp(a) == first);
  const json j = json::parse(first);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("config").at("command") == "verify");
  CHECK(j.at("config").at("seed") == 4);
  CHECK(j.at("config").at("parameters").at("samples") == 500);
  CHECK_FALSE(j.contains("timestamps"));
  // Round trip through the canonical writer reproduces the bytes.
  CHECK(canonical_json(j) + "\n" == first);
  // A different output path only changes the echoed path.
  args_b.back() = b.string();
  REQUIRE(run(args_b).rc == 0);
  json jb = json::parse(slurp(b));
  jb["config"]["output_path"] = a.string();
  CHECK(canonical_json(jb) == canonical_json(j));
}

TEST_CASE("timestamps only on request") {
  const fs::path p = scratch() / "ts.json";
  REQUIRE(run({"verify", "--case", "vnorm", "--p", "3", "--timestamps", "-o", p.string()}).rc == 0);
  CHECK(json::parse(slurp(p)).contains("timestamps"));
}

TEST_CASE("default output directory comes from the environment") {
  const fs::path d = scratch() / "envdir";
  fs::remove_all(d);
  setenv("RANKONE_OUTPUT_DIR", d.string().c_str(), 1);
  const Run r = run({"verify", "--case", "vnorm", "--p", "4"});
  unsetenv("RANKONE_OUTPUT_DIR");
  CHECK(r.rc == 0);
  CHECK(fs::exists(d / "verify.json"));
}

TEST_CASE("not-asserted runs exit zero and name the precondition") {
  const fs::path p = scratch() / "lm.json";
  const Run r = run({"radial", "--mode", "local-max", "--p", "3", "--s", "4", "--scale", "10",
                     "--n-r", "64", "--n-theta", "128", "-o", p.string()});
  CHECK(r.rc == 0);
  const json j = json::parse(slurp(p));
  CHECK(j.at("verdict") == "not-asserted");
  CHECK(j.at("failed_precondition") == "perturbation_smallness");
  CHECK(r.err.find("perturbation_smallness") != std::string::npos);
}

TEST_CASE("failing verdicts exit one") {
  const fs::path p = scratch() / "left.json";
  const Run r = run({"verify", "--case", "bebu_constant_left", "--p", "3", "--samples", "200", "-o", p.string()});
  CHECK(r.rc == 1);
  CHECK(json::parse(slurp(p)).at("verdict") == "fail");
}

TEST_CASE("beurling scan prints CSV rows") {
  const fs::path p = scratch() / "scan.json", csv = scratch() / "scan.csv";
  const Run r = run({"beurling", "--p", "4", "--alpha", "0.6", "--n", "256", "--csv", csv.string(), "-o", p.string()});
  CHECK(r.rc == 0);
  std::istringstream is(r.out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "alpha,ratio,n,L");
  CHECK(row.rfind("0.59999999999999998,", 0) == 0);
  CHECK(fs::exists(csv));
  const json j = json::parse(slurp(p));
  CHECK(j.at("artifacts").at(0) == csv.string());
}

TEST_CASE("other commands run") {
  const fs::path d = scratch();
  CHECK(run({"probe", "--integrand", "beurling_m", "--p", "4", "--M", "3", "--base-count", "11", "--phases", "8",
             "--t-count", "5", "-o", (d / "probe.json").string()}).rc == 0);
  CHECK(json::parse(slurp(d / "probe.json")).at("probe_verdict") == "violation-found");
  CHECK(run({"probe", "--aubert-scan", "3.6,3.8", "--base-count", "101", "--phases", "16", "--t-count", "21",
             "-o", (d / "aubert.json").string()}).rc == 1);
  CHECK(run({"radial", "--mode", "identity", "--p", "3", "--alpha", "0.5", "-o", (d / "id.json").string()}).rc == 0);
  CHECK(run({"radial", "--mode", "example11", "--p", "1.5", "-o", (d / "ex.json").string()}).rc == 0);
  CHECK(run({"radial", "--mode", "linear", "--p", "3", "-o", (d / "lin.json").string()}).rc == 0);
  CHECK(run({"el", "--mode", "pde", "--p", "4", "-o", (d / "pde.json").string()}).rc == 0);
  CHECK(run({"el", "--mode", "ode", "--p", "1.5", "-o", (d / "ode.json").string()}).rc == 0);
  CHECK(run({"beurling", "--mode", "identities", "--n", "128", "-o", (d / "bid.json").string()}).rc == 0);
  CHECK(run({"envelope", "--p", "3", "--sizes", "33,65", "-o", (d / "env.json").string()}).rc == 1);
}

TEST_CASE("profile files") {
  const fs::path prof = scratch() / "profile.json";
  std::ofstream(prof) << R"({"family": "polynomial", "params": {"coefficients": [1.0, -0.3]}, "R": 1.0, "orientation": "plus"})";
  CHECK(run({"radial", "--mode", "identity", "--p", "3", "--profile", prof.string(), "-o", (scratch() / "pf.json").string()}).rc == 0);
  std::ofstream(prof) << "not json";
  const Run bad = run({"radial", "--mode", "identity", "--p", "3", "--profile", prof.string()});
  CHECK(bad.rc == 2);
  CHECK(bad.err.find("profile_json") != std::string::npos);
}

TEST_CASE("config files supply option values") {
  const fs::path cfg = scratch() / "run.toml";
  std::ofstream(cfg) << "seed = 9\n";
  const fs::path p = scratch() / "cfg.json";
  REQUIRE(run({"--config", cfg.string(), "verify", "--case", "cross_form", "--p", "2", "--samples", "100", "-o", p.string()}).rc == 0);
  CHECK(json::parse(slurp(p)).at("config").at("seed") == 9);
}
