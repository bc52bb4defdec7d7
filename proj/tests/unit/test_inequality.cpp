#include <cmath>

#include <doctest.h>

#include "rankone/inequality.hpp"

using namespace rankone;
using doctest::Approx;

TEST_CASE("burkholder majorizes the scaled beurling function") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    const auto rep = verify_bebu(Exponent(p), 2000, 4);
    CAPTURE(p);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.metrics.at("violations") == 0.0);
    CHECK(rep.metrics.at("max_gap") <= 1e-12);
    CHECK(rep.metrics.at("scale_invariance_max_rel_dev") <= 1e-9);
    CHECK(rep.metrics.at("isotropy_max_rel_dev") <= 1e-9);
    // The shared zero on the ray |xi| = (p*-1)|zeta| is an equality point.
    if (p == 2.0) continue;
    const double k = Exponent(p).burkholder_norm();
    bool has_ray = false;
    for (double x : rep.details.at("equality_points_x")) has_ray = has_ray || std::abs(x - k / (1 + k)) < 1e-4;
    CHECK(has_ray);
  }
}

TEST_CASE("constant on the left fails where the constant exceeds one") {
  // At (1, 0): c_3 = 4/3 > B_3(1, 0) = 1.
  const auto rep = verify_case(bebu_case_constant_left(Exponent(3.0)), VerifyOptions{});
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.metrics.at("max_gap") == Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(rep.details.contains("first_violation"));
  // The reported violation reproduces through direct evaluation.
  const auto& v = rep.details.at("first_violation");
  const auto& pt = v.at("point");
  const PlanarGradient g({pt["xi"][0].get<double>(), pt["xi"][1].get<double>()},
                         {pt["zeta"][0].get<double>(), pt["zeta"][1].get<double>()});
  const Violation again = evaluate_case(bebu_case_constant_left(Exponent(3.0)), g);
  CHECK(again.gap == Approx(v.at("gap").get<double>()).epsilon(1e-12));
}

TEST_CASE("p = 2 is an equality case") {
  const Exponent two(2.0);
  const auto c = bebu_case(two);
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    CHECK(std::abs(evaluate_case(c, PlanarGradient::from_moduli(x, 1 - x)).gap) < 1e-15);
  }
}

TEST_CASE("pointwise inequality with parameter M") {
  const Exponent three(3.0);
  const auto c = m_pointwise_case(three, 2.0);
  const Violation at_one = evaluate_case(c, PlanarGradient::from_moduli(1, 0));
  CHECK(at_one.lhs_value == 1.0);
  CHECK(at_one.rhs_value == Approx(4.0 / 3.0));
  const Violation at_i = evaluate_case(c, PlanarGradient::from_moduli(0, 1));
  CHECK(at_i.lhs_value == Approx(-8.0));
  CHECK(at_i.lhs_value <= at_i.rhs_value);
  for (double M : {2.0, 2.5, 4.0}) CHECK(verify_m_pointwise(three, M, 2000, 9).verdict == Verdict::Pass);
  CHECK(verify_m_pointwise(Exponent(1.5), 2.0, 2000, 9).verdict == Verdict::Pass);
  CHECK_THROWS_AS(verify_m_pointwise(three, 1.9, 100, 1), PreconditionError);
}

TEST_CASE("aubert pair and its forced constant") {
  const double m = 2.0 + std::sqrt(3.0);
  const auto rep = verify_aubert_pair(m, 5000, 3);
  CHECK(rep.verdict == Verdict::Pass);
  const double c = 2 * m * m / (1 + m * m);
  CHECK(rep.metrics.at("c") == Approx(c));
  CHECK(rep.metrics.at("forced_c_lower") <= c + 1e-9);
  CHECK(rep.metrics.at("forced_c_upper") >= c - 1e-9);
  CHECK(verify_aubert_pair(1.0, 1000, 3).verdict == Verdict::Pass);
  CHECK_THROWS_AS(verify_aubert_pair(0.9, 100, 1), PreconditionError);
}

TEST_CASE("envelope majorant on a grid") {
  for (double p : {1.5, 3.0}) {
    const auto rep = verify_envelope_majorant(Exponent(p), 256);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.metrics.at("violations") == 0.0);
    CHECK(rep.metrics.at("ray_max_dev") <= 1e-10);
  }
  CHECK_THROWS_AS(verify_envelope_majorant(Exponent(3.0), 8), PreconditionError);
}

TEST_CASE("verification is deterministic") {
  const auto a = verify_bebu(Exponent(4.0), 500, 17).to_json();
  const auto b = verify_bebu(Exponent(4.0), 500, 17).to_json();
  CHECK(canonical_json(a) == canonical_json(b));
}

TEST_CASE("cross form and vnorm reports") {
  for (double p : {1.2, 3.0, 8.0}) {
    CHECK(verify_cross_form(Exponent(p), 10000, 1).verdict == Verdict::Pass);
    CHECK(vnorm_report(Exponent(p)).verdict == Verdict::Pass);
  }
}
