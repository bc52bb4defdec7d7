#include "rankone/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "rankone/beurling.hpp"
#include "rankone/envelope.hpp"
#include "rankone/errors.hpp"
#include "rankone/euler_lagrange.hpp"
#include "rankone/inequality.hpp"
#include "rankone/probe.hpp"
#include "rankone/radial.hpp"
#include "rankone/report.hpp"

namespace rankone {

namespace fs = std::filesystem;

cplx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw PreconditionError("complex_format", "expected a complex number as 're,im', got '" + s + "'");
  }
}

namespace {

struct Common {
  std::string output;
  std::uint64_t seed = 1;
  int threads = 1;
  bool timestamps = false;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path default_output(const std::string& stem) {
  const char* dir = std::getenv("RANKONE_OUTPUT_DIR");
  return fs::path(dir && *dir ? dir : ".") / (stem + ".json");
}

Orientation regime_orientation(double p) { return p >= 2.0 ? Orientation::Plus : Orientation::Minus; }

// Aggregates component reports: fails if any component failed.
ExperimentReport aggregate(const std::string& name, const std::vector<ExperimentReport>& parts) {
  ExperimentReport rep;
  rep.name = name;
  json comps = json::array();
  int passed = 0, failed = 0, not_asserted = 0;
  for (const auto& r : parts) {
    comps.push_back(r.to_json());
    if (r.verdict == Verdict::Pass) ++passed;
    else if (r.verdict == Verdict::Fail) ++failed;
    else ++not_asserted;
  }
  rep.details["components"] = comps;
  rep.metrics["passed"] = passed;
  rep.metrics["failed"] = failed;
  rep.metrics["not_asserted"] = not_asserted;
  rep.verdict = failed == 0 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

// ---------------------------------------------------------------------------
// Command implementations. Each returns the report; `params` receives the
// effective parameter values for the config echo.

struct EvalOpts {
  std::string integrand = "burkholder";
  double p = 2.0, M = 1.0, lambda = 0.0;
  int sign = 1;
  std::string xi = "1,0", zeta = "0,0";
};

ExperimentReport run_eval(const EvalOpts& o, json& params, std::ostream& out) {
  params = {{"integrand", o.integrand}, {"p", o.p},   {"M", o.M},        {"lambda", o.lambda},
            {"sign", o.sign},           {"xi", o.xi}, {"zeta", o.zeta}};
  const IntegrandId id = IntegrandId::parse(o.integrand, o.M, o.lambda, o.sign);
  const Exponent e(o.p);
  const PlanarGradient g{parse_complex(o.xi), parse_complex(o.zeta)};
  const double v = evaluate(id, e, g);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf << "\n";
  ExperimentReport rep;
  rep.name = "eval";
  rep.parameters = params;
  rep.metrics["value"] = v;
  rep.verdict = Verdict::Pass;
  return rep;
}

struct VerifyOpts {
  std::string which = "bebu";
  double p = 3.0, M = 2.0;
  int samples = 10000, grid = 201;
};

ExperimentReport run_verify(const VerifyOpts& o, const Common& c, json& params) {
  params = {{"case", o.which}, {"p", o.p}, {"M", o.M}, {"samples", o.samples}, {"grid", o.grid}};
  require(o.samples >= 1, "samples_positive", "--samples must be >= 1");
  if (o.which == "aubert") return verify_aubert_pair(o.M, o.samples, c.seed);
  const Exponent e(o.p);
  if (o.which == "bebu") return verify_bebu(e, o.samples, c.seed);
  if (o.which == "bebu_constant_left") {
    VerifyOptions vo;
    vo.samples = o.samples;
    vo.seed = c.seed;
    return verify_case(bebu_case_constant_left(e), vo);
  }
  if (o.which == "m_pointwise") return verify_m_pointwise(e, o.M, o.samples, c.seed);
  if (o.which == "envelope_majorant") return verify_envelope_majorant(e, o.grid);
  if (o.which == "cross_form") return verify_cross_form(e, o.samples, c.seed);
  if (o.which == "vnorm") return vnorm_report(e);
  throw PreconditionError("case", "unknown verify case '" + o.which + "'");
}

struct ProbeOpts {
  std::string integrand = "burkholder";
  double p = 3.0, M = 2.0, lambda = 0.0;
  int sign = 1;
  ProbeConfig cfg;
  std::vector<double> aubert_scan;
};

ExperimentReport run_probe(const ProbeOpts& o, json& params) {
  params = {{"integrand", o.integrand}, {"p", o.p},
            {"M", o.M},                 {"lambda", o.lambda},
            {"sign", o.sign},           {"base_count", o.cfg.base_count},
            {"phase_count", o.cfg.phase_count}, {"t_count", o.cfg.t_count},
            {"t_range", o.cfg.t_range}, {"h", o.cfg.h},
            {"tol", o.cfg.tol},         {"aubert_scan", o.aubert_scan}};
  o.cfg.validate();
  if (!o.aubert_scan.empty()) {
    const auto scan = probe_aubert_threshold(o.aubert_scan, o.cfg);
    const auto [lo, hi] = transition_bracket(scan);
    const double target = 2.0 + std::sqrt(3.0);
    ExperimentReport rep;
    rep.name = "aubert_threshold_scan";
    rep.parameters = params;
    json rows = json::array();
    for (const auto& [m, r] : scan)
      rows.push_back({{"M", m}, {"probe_verdict", r.verdict()}, {"max_normalized", r.max_normalized}});
    rep.details["scan"] = rows;
    rep.metrics["bracket_lower"] = lo;
    rep.metrics["bracket_upper"] = hi;
    rep.metrics["target"] = target;
    const bool ok = std::abs(lo - target) <= 0.02 && std::abs(hi - target) <= 0.02;
    rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return rep;
  }
  const IntegrandId id = IntegrandId::parse(o.integrand, o.M, o.lambda, o.sign);
  const Exponent e(o.p);
  return to_report(id, e, o.cfg, probe_rank_one_concavity(id, e, o.cfg));
}

struct EnvelopeOpts {
  double p = 3.0, tol = 1e-6;
  int max_iter = 100000;
  std::vector<int> sizes{65, 129, 257};
  std::string csv;
};

ExperimentReport run_envelope(const EnvelopeOpts& o, json& params) {
  params = {{"p", o.p}, {"sizes", o.sizes}, {"tol", o.tol}, {"max_iter", o.max_iter}, {"csv", o.csv}};
  const Exponent e(o.p);
  ExperimentReport rep = envelope_convergence_study(e, o.sizes, o.tol, o.max_iter);
  if (!o.csv.empty()) {
    const int n = o.sizes.back();
    const auto [grid, run] = compute_envelope(IntegrandId::beurling_m(e.burkholder_norm()), e, n, n,
                                              2.0, 2.0, o.tol, o.max_iter);
    write_grid_csv(grid, o.csv);
    rep.artifacts.push_back(o.csv);
  }
  return rep;
}

struct RadialOpts {
  std::string mode = "identity";
  std::string profile_file, family = "power", orientation;
  double p = 3.0, alpha = 0.5, coef = 1.0, R = 1.0, s = 4.0, r_outer = 3.0, margin = 0.9, scale = 1.0;
  std::vector<double> coeffs;
  int bumps = 3, n_r = 256, n_theta = 256, pieces = 4;
  double slope_scale = 0.5;
  std::string integrand = "burkholder", csv;
};

RadialProfile build_profile(const RadialOpts& o) {
  if (!o.profile_file.empty()) {
    std::ifstream is(o.profile_file);
    if (!is) throw std::runtime_error("cannot read profile file '" + o.profile_file + "'");
    json j;
    try {
      is >> j;
    } catch (const json::exception& ex) {
      throw PreconditionError("profile_json", "profile file '" + o.profile_file + "' is not JSON: " + ex.what());
    }
    return RadialProfile::from_json(j);
  }
  const Orientation orient =
      o.orientation.empty() ? regime_orientation(o.p) : parse_orientation(o.orientation);
  if (o.family == "power") return RadialProfile::power(o.coef, o.alpha, o.R, orient);
  if (o.family == "polynomial") return RadialProfile::polynomial(o.coeffs, o.R, orient);
  throw PreconditionError("profile_family", "--family must be power or polynomial (use --profile for others)");
}

ExperimentReport run_radial(const RadialOpts& o, const Common& c, json& params) {
  params = {{"mode", o.mode},       {"p", o.p},         {"profile_file", o.profile_file},
            {"family", o.family},   {"alpha", o.alpha}, {"coef", o.coef},
            {"coeffs", o.coeffs},   {"R", o.R},         {"orientation", o.orientation},
            {"s", o.s},             {"r_outer", o.r_outer}, {"bumps", o.bumps},
            {"margin", o.margin},   {"scale", o.scale}, {"n_r", o.n_r},
            {"n_theta", o.n_theta}, {"pieces", o.pieces}, {"slope_scale", o.slope_scale},
            {"integrand", o.integrand}, {"csv", o.csv}};
  const Exponent e(o.p);
  if (o.mode == "identity") {
    const RadialProfile prof = build_profile(o);
    ExperimentReport rep = energy_identity_report(prof, e);
    if (!o.csv.empty()) {
      write_radial_csv(IntegrandId::burkholder(), prof, e, o.csv);
      rep.artifacts.push_back(o.csv);
    }
    return rep;
  }
  if (o.mode == "example11") return example_11_energy(e, o.R, o.r_outer);
  if (o.mode == "local-max") {
    require(o.n_r >= 2 && o.n_theta >= 8, "grid", "--n-r >= 2 and --n-theta >= 8 required");
    const RadialProfile prof = o.profile_file.empty()
                                   ? RadialProfile::power(1.0, o.alpha, 1.0, Orientation::Plus)
                                   : build_profile(o);
    PerturbationField eps = PerturbationField::random(c.seed, o.bumps);
    if (o.s > o.p) eps = calibrate_perturbation(eps, e, o.s, o.margin);
    return local_max_experiment(prof, o.s, eps.scaled(o.scale), e, {o.n_r, o.n_theta});
  }
  if (o.mode == "linear") {
    std::mt19937_64 rng(c.seed);
    const MatrixProfile lambda = MatrixProfile::random(rng, o.R, o.pieces, o.slope_scale);
    return radially_linear_comparison(IntegrandId::parse(o.integrand, 1.0, 0.0, 1), lambda, e);
  }
  throw PreconditionError("mode", "unknown radial mode '" + o.mode + "'");
}

struct ElOpts {
  std::string mode = "pde";
  double p = 3.0, lo = 1e-3, hi = 1e3, tol = 1e-9;
  int n = 25, count = 20;
  std::string csv;
};

ExperimentReport run_el(const ElOpts& o, const Common& c, json& params) {
  params = {{"mode", o.mode}, {"p", o.p}, {"grid_lo", o.lo}, {"grid_hi", o.hi}, {"grid_n", o.n},
            {"tol", o.tol},   {"count", o.count}, {"csv", o.csv}};
  require(o.p > 1.0, "p_gt_1", "--p must be > 1");
  if (o.mode == "pde") {
    const auto grid = log_uv_grid(o.lo, o.hi, o.n);
    const IntegrandUV E = IntegrandUV::burkholder(o.p);
    ExperimentReport rep = pde_pair_grid_report(E, grid, o.tol);
    if (!o.csv.empty()) {
      write_residual_csv(E, grid, o.csv);
      rep.artifacts.push_back(o.csv);
    }
    return rep;
  }
  if (o.mode == "radial") return radial_el_report(o.p, c2_test_profiles());
  if (o.mode == "ode") return ode_reduction_check(o.p);
  if (o.mode == "uniqueness") return uniqueness_probe(o.p, o.count, c.seed);
  throw PreconditionError("mode", "unknown el mode '" + o.mode + "'");
}

struct BeurlingOpts {
  std::string mode = "scan";
  double p = 4.0, L = 40.0;
  std::vector<double> alphas;
  int n = 1024;
  std::string csv;
};

ExperimentReport run_beurling(const BeurlingOpts& o, const Common& c, json& params, std::ostream& out) {
  const std::vector<double> alphas = o.alphas.empty() ? default_alpha_grid(o.p) : o.alphas;
  params = {{"mode", o.mode}, {"p", o.p}, {"alpha", alphas}, {"n", o.n}, {"L", o.L}, {"csv", o.csv}};
  if (o.mode == "identities") return beurling_identity_report(o.n, o.L, c.seed);
  if (o.mode == "refinement") {
    std::vector<int> sizes;
    for (int n = 128; n <= o.n; n *= 2) sizes.push_back(n);
    return blended_map_refinement(o.p, alphas.front(), sizes, o.L);
  }
  if (o.mode == "scan") {
    const std::optional<fs::path> csv = o.csv.empty() ? std::nullopt : std::optional<fs::path>(o.csv);
    ExperimentReport rep = beurling_scan_report(o.p, alphas, o.n, o.L, csv);
    out << "alpha,ratio,n,L\n";
    char buf[160];
    for (const auto& row : rep.details["scan"]) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", row["alpha"].get<double>(),
                    row["ratio"].get<double>(), o.n, o.L);
      out << buf;
    }
    return rep;
  }
  throw PreconditionError("mode", "unknown beurling mode '" + o.mode + "'");
}

ExperimentReport run_suite(double p, const Common& c, json& params) {
  params = {{"p", p}};
  const Exponent e(p);
  std::vector<ExperimentReport> parts;
  parts.push_back(verify_cross_form(e, 10000, c.seed));
  parts.push_back(vnorm_report(e));
  parts.push_back(verify_bebu(e, 10000, c.seed));
  parts.push_back(verify_envelope_majorant(e, 201));
  {
    ProbeConfig cfg;
    cfg.base_count = 41;
    cfg.phase_count = 16;
    cfg.t_count = 21;
    const IntegrandId id = IntegrandId::burkholder_m(e.burkholder_norm());
    ExperimentReport r = to_report(id, e, cfg, probe_rank_one_concavity(id, e, cfg));
    r.verdict = r.details["probe_verdict"] == "concave-on-sample" ? Verdict::Pass : Verdict::Fail;
    parts.push_back(r);
  }
  parts.push_back(envelope_convergence_study(e, {33, 65, 129}, 1e-6, 100000));
  parts.push_back(energy_identity_report(RadialProfile::power(1.0, 0.5, 1.0, regime_orientation(p)), e));
  parts.push_back(example_11_energy(e, 1.0, 3.0));
  {
    std::mt19937_64 rng(c.seed);
    parts.push_back(radially_linear_comparison(IntegrandId::burkholder(), MatrixProfile::random(rng, 1.0, 4, 0.5), e));
  }
  {
    const double s = p + 1.0;
    const auto eps = calibrate_perturbation(PerturbationField::random(c.seed, 3), e, s);
    parts.push_back(local_max_experiment(RadialProfile::power(1.0, 0.5, 1.0), s, eps, e, {128, 256}));
  }
  parts.push_back(pde_pair_grid_report(IntegrandUV::burkholder(p), log_uv_grid(1e-3, 1e3, 25), 1e-9));
  parts.push_back(radial_el_report(p, c2_test_profiles()));
  parts.push_back(ode_reduction_check(p));
  parts.push_back(beurling_identity_report(128, 40.0, c.seed));
  parts.push_back(beurling_scan_report(p, default_alpha_grid(p), 256, 40.0));
  ExperimentReport rep = aggregate("suite", parts);
  rep.parameters = params;
  return rep;
}

int exit_code(const ExperimentReport& r) {
  return r.verdict == Verdict::Fail ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical workbench for rank-one concave integrands", "rankone"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("-o,--output", c.output, "Report path (default $RANKONE_OUTPUT_DIR/<command>.json)");
  app.add_option("--seed", c.seed, "Seed for every random choice");
  app.add_option("--threads", c.threads, "Worker cap (computations are single threaded)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--timestamps", c.timestamps, "Add wall-clock timestamps to the report");
  app.set_config("--config", "", "TOML/INI file with option values");

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Evaluate an integrand at (xi, zeta)");
  eval->add_option("--integrand", eo.integrand);
  eval->add_option("--p", eo.p);
  eval->add_option("--M", eo.M);
  eval->add_option("--lambda", eo.lambda);
  eval->add_option("--sign", eo.sign);
  eval->add_option("--xi", eo.xi, "re,im");
  eval->add_option("--zeta", eo.zeta, "re,im");

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "Check a pointwise inequality");
  verify->add_option("--case", vo.which)
      ->check(CLI::IsMember({"bebu", "bebu_constant_left", "m_pointwise", "aubert",
                             "envelope_majorant", "cross_form", "vnorm"}));
  verify->add_option("--p", vo.p);
  verify->add_option("--M", vo.M);
  verify->add_option("--samples", vo.samples);
  verify->add_option("--grid", vo.grid);

  ProbeOpts po;
  auto* probe = app.add_subcommand("probe", "Search for rank-one concavity violations");
  probe->add_option("--integrand", po.integrand);
  probe->add_option("--p", po.p);
  probe->add_option("--M", po.M);
  probe->add_option("--lambda", po.lambda);
  probe->add_option("--sign", po.sign);
  probe->add_option("--base-count", po.cfg.base_count);
  probe->add_option("--phases", po.cfg.phase_count);
  probe->add_option("--t-count", po.cfg.t_count);
  probe->add_option("--t-range", po.cfg.t_range);
  probe->add_option("--step", po.cfg.h, "Relative second-difference step");
  probe->add_option("--tol", po.cfg.tol);
  probe->add_option("--aubert-scan", po.aubert_scan, "M values, e.g. 3.70,3.72")->delimiter(',');

  EnvelopeOpts nv;
  auto* envelope = app.add_subcommand("envelope", "Zig-zag envelope convergence study");
  envelope->add_option("--p", nv.p);
  envelope->add_option("--sizes", nv.sizes)->delimiter(',');
  envelope->add_option("--tol", nv.tol);
  envelope->add_option("--max-iter", nv.max_iter);
  envelope->add_option("--csv", nv.csv, "Write the finest grid");

  RadialOpts ro;
  auto* radial = app.add_subcommand("radial", "Radial stretching experiments");
  radial->add_option("--mode", ro.mode)->check(CLI::IsMember({"identity", "example11", "local-max", "linear"}));
  radial->add_option("--p", ro.p);
  radial->add_option("--profile", ro.profile_file, "Profile JSON file");
  radial->add_option("--family", ro.family);
  radial->add_option("--alpha", ro.alpha);
  radial->add_option("--coef", ro.coef);
  radial->add_option("--coeffs", ro.coeffs)->delimiter(',');
  radial->add_option("--R", ro.R);
  radial->add_option("--orientation", ro.orientation);
  radial->add_option("--s", ro.s);
  radial->add_option("--r-outer", ro.r_outer);
  radial->add_option("--bumps", ro.bumps);
  radial->add_option("--margin", ro.margin);
  radial->add_option("--scale", ro.scale, "Extra factor applied after calibration");
  radial->add_option("--n-r", ro.n_r);
  radial->add_option("--n-theta", ro.n_theta);
  radial->add_option("--pieces", ro.pieces);
  radial->add_option("--slope-scale", ro.slope_scale);
  radial->add_option("--integrand", ro.integrand);
  radial->add_option("--csv", ro.csv);

  ElOpts lo;
  auto* el = app.add_subcommand("el", "Euler-Lagrange residuals and ODE reduction");
  el->add_option("--mode", lo.mode)->check(CLI::IsMember({"pde", "radial", "ode", "uniqueness"}));
  el->add_option("--p", lo.p);
  el->add_option("--grid-lo", lo.lo);
  el->add_option("--grid-hi", lo.hi);
  el->add_option("--grid-n", lo.n);
  el->add_option("--tol", lo.tol);
  el->add_option("--count", lo.count);
  el->add_option("--csv", lo.csv);

  BeurlingOpts bo;
  auto* beurling = app.add_subcommand("beurling", "Discrete Beurling transform experiments");
  beurling->add_option("--mode", bo.mode)->check(CLI::IsMember({"scan", "identities", "refinement"}));
  beurling->add_option("--p", bo.p);
  beurling->add_option("--alpha", bo.alphas)->delimiter(',');
  beurling->add_option("--n", bo.n);
  beurling->add_option("--L", bo.L);
  beurling->add_option("--csv", bo.csv);

  double suite_p = 3.0;
  auto* suite = app.add_subcommand("suite", "Run the verification battery at one exponent");
  suite->add_option("--p", suite_p);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string started = c.timestamps ? utc_now() : "";
  ExperimentReport rep;
  json params;
  std::string command;
  try {
    if (eval->parsed()) command = "eval", rep = run_eval(eo, params, out);
    else if (verify->parsed()) command = "verify", rep = run_verify(vo, c, params);
    else if (probe->parsed()) command = "probe", rep = run_probe(po, params);
    else if (envelope->parsed()) command = "envelope", rep = run_envelope(nv, params);
    else if (radial->parsed()) command = "radial", rep = run_radial(ro, c, params);
    else if (el->parsed()) command = "el", rep = run_el(lo, c, params);
    else if (beurling->parsed()) command = "beurling", rep = run_beurling(bo, c, params, out);
    else if (suite->parsed()) command = "suite", rep = run_suite(suite_p, c, params);
  } catch (const PreconditionError& ex) {
    err << "error: invalid parameter (" << ex.constraint() << "): " << ex.what() << "\n";
    return 2;
  } catch (const NonConvergenceError& ex) {
    err << "error: no convergence (achieved " << ex.achieved() << "): " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  const fs::path path = c.output.empty() ? default_output(command) : fs::path(c.output);
  json j = rep.to_json();
  j["schema"] = 1;
  j["config"] = {{"command", command},
                 {"parameters", params},
                 {"output_path", path.string()},
                 {"seed", c.seed},
                 {"threads", c.threads}};
  if (c.timestamps) j["timestamps"] = {{"started", started}, {"finished", utc_now()}};
  // eval only prints unless a report path was asked for.
  if (command != "eval" || !c.output.empty()) {
    try {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      emit_report(j, path);
    } catch (const std::exception& ex) {
      err << "error: " << ex.what() << "\n";
      return 2;
    }
    err << command << ": " << to_string(rep.verdict);
    if (!rep.failed_precondition.empty()) err << " (" << rep.failed_precondition << ")";
    err << " -> " << path.string() << "\n";
  }
  return exit_code(rep);
}

}  // namespace rankone
