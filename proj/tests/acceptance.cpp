// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rankone/beurling.hpp"
#include "rankone/envelope.hpp"
#include "rankone/euler_lagrange.hpp"
#include "rankone/inequality.hpp"
#include "rankone/kernel.hpp"
#include "rankone/probe.hpp"
#include "rankone/radial.hpp"
#include "support/profiles.hpp"

using namespace rankone;

namespace {

const std::vector<double> kExponents{1.2, 1.5, 2.0, 3.0, 4.0, 8.0};

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome cross_form() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool ok = true;
  for (double p : kExponents) {
    const auto rep = verify_cross_form(Exponent(p), 10000, 1);
    worst = std::max(worst, rep.metrics.at("max_rel_diff"));
    ok = ok && rep.passed();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && worst <= 1e-12 && secs < 1.0,
          fmt("max relative difference %.2e over 6 x 10^4 gradients, %.2f s", worst, secs)};
}

Outcome vnorm_display() {
  double worst = 0.0;
  for (double p : kExponents) {
    const Exponent e(p);
    worst = std::max(worst, std::abs(vnorm(IntegrandId::burkholder(), e).value - e.burkholder_norm()));
  }
  return {worst <= 1e-6, fmt("max |vnorm - (p*-1)| = %.2e", worst)};
}

Outcome probe_thresholds() {
  const auto t0 = std::chrono::steady_clock::now();
  const Exponent three(3.0), four(4.0), half(1.5);
  const ProbeConfig dense;
  const bool at_critical =
      !probe_rank_one_concavity(IntegrandId::burkholder_m(2.0), three, dense).violation_found;
  const auto below = probe_rank_one_concavity(IntegrandId::burkholder_m(1.95), three, dense);
  const bool witness = below.violation_found && below.witness &&
                       second_difference(IntegrandId::burkholder_m(1.95), three, below.witness->base,
                                         below.witness->direction, below.witness->t,
                                         dense.h * below.witness->base.op_norm()) > 0.0;

  const auto scan = probe_aubert_threshold({3.70, 3.72, 3.74, 3.76}, dense);
  const auto [lo, hi] = transition_bracket(scan);
  const double target = 2.0 + std::sqrt(3.0);
  const bool bracket = std::isfinite(lo) && std::isfinite(hi) && std::abs(lo - target) <= 0.02 &&
                       std::abs(hi - target) <= 0.02 && lo < hi;

  ProbeConfig local;
  local.base_count = 0;
  local.phase_count = 8;
  local.t_count = 5;
  local.t_range = 0.05;
  local.base_points = {PlanarGradient::from_moduli(1.0, 0.0)};
  const bool near_one = probe_rank_one_concavity(IntegrandId::beurling_m(3.0), four, local).violation_found;
  local.base_points = {PlanarGradient::from_moduli(0.0, 1.0)};
  const bool near_i = probe_rank_one_concavity(IntegrandId::beurling_m(2.0), half, local).violation_found;

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {at_critical && witness && bracket && near_one && near_i && secs < 30.0,
          fmt("B_3^2 concave %s, B_3^1.95 witness %s, Aubert bracket [%.2f, %.2f], F_4 near (1,0) %s, "
              "F_1.5 near (0,1) %s, %.1f s",
              at_critical ? "yes" : "no", witness ? "yes" : "no", lo, hi, near_one ? "violated" : "concave",
              near_i ? "violated" : "concave", secs)};
}

Outcome envelope() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string s;
  for (double p : {1.5, 3.0}) {
    const auto rep = envelope_convergence_study(Exponent(p), {65, 129, 257}, 1e-6, 100000);
    ok = ok && rep.passed();
    s += fmt("p=%g inner errors", p);
    for (const auto& r : rep.details.at("runs")) s += fmt(" %.4f", r.at("inner_sup_error").get<double>());
    s += rep.metrics.at("monotone_refinement") > 0 ? " (decreasing); " : " (not decreasing); ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && secs < 120.0, s + fmt("bound 5e-3, %.1f s", secs)};
}

Outcome energy_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0, total = 0;
  double worst = 0.0;
  for (double p : {1.5, 3.0, 4.0}) {
    const Exponent e(p);
    for (const auto& pr : testing::energy_profiles(p >= 2.0 ? Orientation::Plus : Orientation::Minus)) {
      const auto rep = energy_identity_report(pr, e);
      ++total;
      passed += rep.passed();
      worst = std::max(worst, rep.metrics.at("abs_diff") / rep.metrics.at("tolerance"));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {passed == total && secs < 10.0,
          fmt("%d/%d profile-exponent pairs, worst |diff|/tol %.2e, %.2f s", passed, total, worst, secs)};
}

Outcome zero_energy() {
  double worst = 0.0;
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (double R : {1.0, 2.0}) {
      const auto rep = example_11_energy(Exponent(p), R, 4.0 * R);
      ok = ok && rep.passed();
      worst = std::max(worst, rep.metrics.at("relative_total"));
    }
  }
  return {ok && worst <= 1e-8, fmt("max |total|/|inner| = %.2e over 8 cases", worst)};
}

Outcome radially_linear() {
  int passed = 0, total = 0;
  double min_slack = INFINITY;
  for (double p : {1.5, 3.0}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      std::mt19937_64 rng(seed);
      const auto rep = radially_linear_comparison(IntegrandId::burkholder(), MatrixProfile::random(rng, 1.0, 4, 0.5),
                                                  Exponent(p));
      ++total;
      passed += rep.passed() && rep.metrics.at("slack") >= -1e-8;
      if (rep.metrics.count("slack")) min_slack = std::min(min_slack, rep.metrics.at("slack"));
    }
  }
  return {passed == total, fmt("%d/%d profiles, min slack %.3e", passed, total, min_slack)};
}

Outcome local_maximum() {
  const Exponent three(3.0);
  const double s = 4.0;
  const auto prof = RadialProfile::power(1.0, 1.0 - 2.0 / s, 1.0);
  int passed = 0;
  double max_energy = -INFINITY;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto eps = calibrate_perturbation(PerturbationField::random(seed, 3), three, s);
    const auto rep = local_max_experiment(prof, s, eps, three);
    passed += rep.passed() && rep.metrics.at("energy") <= std::numbers::pi + 1e-6;
    if (rep.metrics.count("energy")) max_energy = std::max(max_energy, rep.metrics.at("energy"));
  }
  const auto big = calibrate_perturbation(PerturbationField::random(1, 3), three, s).scaled(10.0);
  const auto refused = local_max_experiment(prof, s, big, three);
  const bool guard = refused.verdict == Verdict::NotAsserted && refused.failed_precondition == "perturbation_smallness";
  return {passed == 10 && guard, fmt("%d/10 perturbations, max energy - pi = %.3e, oversized field %s", passed,
                                     max_energy - std::numbers::pi,
                                     guard ? "not asserted" : to_string(refused.verdict).c_str())};
}

Outcome euler_lagrange() {
  double pde = 0.0, radial = 0.0, ode = 0.0;
  bool ok = true;
  const auto grid = log_uv_grid(1e-3, 1e3, 25);
  for (double p : kExponents) {
    const auto g = pde_pair_grid_report(IntegrandUV::burkholder(p), grid, 1e-9);
    const auto r = radial_el_report(p, c2_test_profiles(), 64, 1e-8);
    ok = ok && g.passed() && r.passed();
    pde = std::max({pde, g.metrics.at("max_first_rel"), g.metrics.at("max_second_rel")});
    radial = std::max(radial, r.metrics.at("max_rel"));
  }
  for (double p : {1.5, 2.0, 3.0}) {
    const auto o = ode_reduction_check(p);
    ok = ok && o.passed();
    ode = std::max(ode, o.metrics.at("reconstruction_max_rel_error"));
  }
  return {ok, fmt("PDE pair %.2e, radial %.2e, ODE reconstruction %.2e", pde, radial, ode)};
}

Outcome beurling() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto id = beurling_identity_report(256, 40.0, 1);
  const double planch = id.metrics.at("plancherel_rel_error"), ident = id.metrics.at("identity_rel_error");
  bool ok = planch <= 1e-10 && ident <= 1e-12;
  double best4 = 0.0, excess = -INFINITY;
  for (double p : {1.5, 3.0, 4.0}) {
    const auto rep = beurling_scan_report(p, default_alpha_grid(p), 1024, 40.0);
    ok = ok && rep.passed();
    excess = std::max(excess, rep.metrics.at("max_relative_excess"));
    if (p == 4.0) best4 = rep.metrics.at("best_ratio");
  }
  const bool band = best4 >= 2.85 && best4 <= 3.05;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && band && secs < 120.0,
          fmt("Plancherel %.1e, S dbar = d %.1e, p=4 best ratio %.4f (band [2.85, 3.05] %s), "
              "max ratio/(p*-1) - 1 = %.3f, %.1f s",
              planch, ident, best4, band ? "met" : "missed", excess, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"cross-form identity", cross_form},
      {"norm display", vnorm_display},
      {"rank-one concavity thresholds", probe_thresholds},
      {"envelope convergence", envelope},
      {"radial energy identity", energy_identity},
      {"zero-energy extension", zero_energy},
      {"radially linear comparison", radially_linear},
      {"local maximum", local_maximum},
      {"Euler-Lagrange", euler_lagrange},
      {"Beurling transform", beurling},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s: %s | %s\n", k, o.pass ? "PASS" : "FAIL", name, o.summary.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
