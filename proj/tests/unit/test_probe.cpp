#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rankone/probe.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

ProbeConfig small_config() {
  ProbeConfig cfg;
  cfg.base_count = 25;
  cfg.phase_count = 16;
  cfg.t_count = 11;
  return cfg;
}

ProbeConfig near(double x, double y) {
  ProbeConfig cfg;
  cfg.base_count = 0;
  cfg.base_points = {PlanarGradient::from_moduli(x, y)};
  cfg.phase_count = 8;
  cfg.t_count = 5;
  cfg.t_range = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("second differences of explicit restrictions") {
  const Exponent four(4.0);
  const auto a = PlanarGradient::from_moduli(1, 0);
  const auto x = PlanarGradient::from_moduli(1, 1);
  // B_4 along t: (1 - 2t)(1 + 2t)^3 for t >= 0 and 1 + 4t for t < 0, where
  // zeta = t changes sign. The symmetric difference at the kink is -16 h (1 + h).
  for (double h : {1e-3, 1e-4})
    CHECK(second_difference(IntegrandId::burkholder(), four, a, x, 0.0, h) == Approx(-16 * h * (1 + h)).epsilon(1e-5));
  const double exact = -24 * 1.2 * 1.2 + 24 * 0.8 * 1.2;
  CHECK(second_difference(IntegrandId::burkholder(), four, a, x, 0.1, 1e-4) == Approx(exact).epsilon(1e-6));
  CHECK(exact == Approx(-11.52));
  // F_4 with M = 3: (1 + t)^4 - 81 t^4.
  CHECK(second_difference(IntegrandId::beurling_m(3.0), four, a, x, 0.0, 1e-4) == Approx(12.0).epsilon(1e-6));
  CHECK_THROWS_AS(second_difference(IntegrandId::burkholder(), four, a, x, 0.0, 0.0), PreconditionError);
}

TEST_CASE("finite differences converge at second order on a polynomial restriction") {
  const Exponent four(4.0);
  const auto a = PlanarGradient::from_moduli(1, 0);
  const auto x = PlanarGradient::from_moduli(1, 1);
  const double t = 0.1;
  const double exact = -24 * (1 + 2 * t) * (1 + 2 * t) + 24 * (1 - 2 * t) * (1 + 2 * t);
  const double e1 = std::abs(second_difference(IntegrandId::burkholder(), four, a, x, t, 1e-2) - exact);
  const double e2 = std::abs(second_difference(IntegrandId::burkholder(), four, a, x, t, 5e-3) - exact);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.05));
}

TEST_CASE("burkholder is concave on the sample at the critical M") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    const Exponent e(p);
    const auto r = probe_rank_one_concavity(IntegrandId::burkholder_m(e.burkholder_norm()), e, small_config());
    CAPTURE(p);
    CHECK_FALSE(r.violation_found);
    CHECK(r.triples >= 25L * 256 * 11);
    CHECK(r.verdict() == "concave-on-sample");
  }
}

TEST_CASE("below the critical M a witness appears") {
  const Exponent three(3.0);
  const auto id = IntegrandId::burkholder_m(1.95);
  const auto r = probe_rank_one_concavity(id, three, small_config());
  REQUIRE(r.violation_found);
  const auto& w = *r.witness;
  CHECK(w.second_difference > 0.0);
  // Reproducible through the public second difference.
  const double again = second_difference(id, three, w.base, w.direction, w.t, 1e-3 * w.base.op_norm());
  CHECK(again == Approx(w.second_difference).epsilon(1e-12));
  CHECK(std::abs(w.direction.abs_xi() - w.direction.abs_zeta()) < 1e-15);
}

TEST_CASE("beurling function fails concavity where the paper says") {
  const auto p4 = probe_rank_one_concavity(IntegrandId::beurling_m(3.0), Exponent(4.0), near(1.0, 0.0));
  CHECK(p4.violation_found);
  const auto p15 = probe_rank_one_concavity(IntegrandId::beurling_m(2.0), Exponent(1.5), near(0.0, 1.0));
  CHECK(p15.violation_found);
}

TEST_CASE("aubert threshold") {
  ProbeConfig cfg;
  cfg.base_count = 101;
  cfg.phase_count = 16;
  cfg.t_count = 21;
  const auto scan = probe_aubert_threshold({3.6, 3.8}, cfg);
  CHECK(scan[0].second.violation_found);
  CHECK_FALSE(scan[1].second.violation_found);
  const auto [lo, hi] = transition_bracket(scan);
  CHECK(lo == 3.6);
  CHECK(hi == 3.8);
  CHECK_FALSE(probe_rank_one_concavity(IntegrandId::aubert(2.0 + std::sqrt(3.0)), Exponent(4.0), cfg)
                  .violation_found);
  CHECK_THROWS_AS(probe_aubert_threshold({3.8, 3.6}, cfg), PreconditionError);
}

TEST_CASE("probe verdict is invariant under phase rotation of the base") {
  ProbeConfig cfg = near(0.9, 0.1);
  const auto a = probe_rank_one_concavity(IntegrandId::beurling_m(3.0), Exponent(4.0), cfg);
  cfg.base_points = {PlanarGradient(std::polar(0.9, 1.1), std::polar(0.1, -0.4))};
  const auto b = probe_rank_one_concavity(IntegrandId::beurling_m(3.0), Exponent(4.0), cfg);
  CHECK(a.violation_found == b.violation_found);
}

TEST_CASE("probe config validation") {
  ProbeConfig cfg;
  cfg.h = 1e-7;
  CHECK_THROWS_AS(cfg.validate(), PreconditionError);
  cfg.h = 1e-3;
  cfg.base_count = 0;
  CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("probe report is not asserted and carries the witness") {
  const auto id = IntegrandId::beurling_m(3.0);
  const Exponent four(4.0);
  const auto cfg = near(1.0, 0.0);
  const auto rep = to_report(id, four, cfg, probe_rank_one_concavity(id, four, cfg));
  CHECK(rep.verdict == Verdict::NotAsserted);
  CHECK(rep.details.at("probe_verdict") == "violation-found");
  CHECK(rep.details.contains("witness"));
}
