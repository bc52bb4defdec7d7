#include "rankone/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace rankone {

namespace {

constexpr double kEqualityTol = 1e-10;
constexpr double kScaleTol = 1e-9;
constexpr int kMaxEqualityPoints = 32;

json violation_json(const Violation& v) {
  return json{{"point", to_json(v.point)},
              {"lhs_value", v.lhs_value},
              {"rhs_value", v.rhs_value},
              {"gap", v.gap}};
}

PlanarGradient with_phases(double x, double y, double t1, double t2) {
  return {std::polar(x, t1), std::polar(y, t2)};
}

}  // namespace

Violation evaluate_case(const InequalityCase& c, const PlanarGradient& g) {
  const Exponent e(c.p);
  double l = evaluate(c.lhs, e, g);
  double r = evaluate(c.rhs, e, g);
  if (c.constant_on == InequalityCase::Side::Lhs) {
    l *= c.constant;
  } else {
    r *= c.constant;
  }
  return {g, l, r, l - r};
}

ExperimentReport verify_case(const InequalityCase& c, const VerifyOptions& opt) {
  require(opt.samples >= 0, "samples_nonnegative", "samples must be >= 0");
  require(opt.sweep_points >= 2, "sweep_points", "sweep needs at least 2 points");
  const Exponent e(c.p);
  const double degree = c.lhs.degree(e);

  ExperimentReport rep;
  rep.name = c.name;
  rep.parameters = {{"p", c.p},
                    {"constant", c.constant},
                    {"constant_on", c.constant_on == InequalityCase::Side::Lhs ? "lhs" : "rhs"},
                    {"lhs", c.lhs.name()},
                    {"rhs", c.rhs.name()},
                    {"samples", opt.samples},
                    {"seed", opt.seed},
                    {"tol", opt.tol},
                    {"sweep_points", opt.sweep_points},
                    {"sample_domain", c.sample_domain}};

  Violation worst{};
  worst.gap = -std::numeric_limits<double>::infinity();
  std::optional<Violation> first_violation;
  long violations = 0;
  long evaluated = 0;

  auto consider = [&](const Violation& v) {
    ++evaluated;
    if (v.gap > worst.gap) worst = v;
    if (v.gap > opt.tol) {
      ++violations;
      if (!first_violation) first_violation = v;
    }
  };

  // Deterministic sweep on the segment.
  std::vector<double> sweep_gap(opt.sweep_points);
  const double step = 1.0 / (opt.sweep_points - 1);
  for (int i = 0; i < opt.sweep_points; ++i) {
    const double x = (i == opt.sweep_points - 1) ? 1.0 : i * step;
    const Violation v = evaluate_case(c, PlanarGradient::from_moduli(x, 1.0 - x));
    sweep_gap[i] = v.gap;
    consider(v);
  }
  for (double x : c.special_x) {
    if (x >= 0.0 && x <= 1.0) consider(evaluate_case(c, PlanarGradient::from_moduli(x, 1.0 - x)));
  }

  // Equality points: local maxima of the gap that touch zero.
  json equality = json::array();
  long near_zero = 0;
  for (int i = 0; i < opt.sweep_points; ++i) {
    const double g = sweep_gap[i];
    if (std::abs(g) > kEqualityTol) continue;
    ++near_zero;
    const bool left_ok = i == 0 || sweep_gap[i - 1] <= g;
    const bool right_ok = i == opt.sweep_points - 1 || sweep_gap[i + 1] < g;
    if (left_ok && right_ok && static_cast<int>(equality.size()) < kMaxEqualityPoints) {
      equality.push_back(i * step);
    }
  }

  // Random samples with random phases; also checks isotropy.
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  double isotropy_dev = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const double x = unit(rng);
    const double t1 = two_pi * unit(rng), t2 = two_pi * unit(rng);
    const Violation v = evaluate_case(c, with_phases(x, 1.0 - x, t1, t2));
    const Violation m = evaluate_case(c, PlanarGradient::from_moduli(x, 1.0 - x));
    const double scale = std::abs(m.lhs_value) + std::abs(m.rhs_value) + 1e-300;
    isotropy_dev = std::max(isotropy_dev, std::abs(v.gap - m.gap) / scale);
    consider(v);
  }

  // Homogeneity: gap(t g) = t^degree gap(g).
  double scale_dev = 0.0;
  for (int s = 0; s < opt.scale_pairs; ++s) {
    const double x = unit(rng), y = unit(rng);
    const double t1 = two_pi * unit(rng), t2 = two_pi * unit(rng);
    const double t = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
    const PlanarGradient g = with_phases(x, y, t1, t2);
    const Violation a = evaluate_case(c, g);
    const Violation b = evaluate_case(c, g * t);
    const double td = std::pow(t, degree);
    const double scale = td * (std::abs(a.lhs_value) + std::abs(a.rhs_value)) + 1e-300;
    scale_dev = std::max(scale_dev, std::abs(b.gap - td * a.gap) / scale);
  }

  rep.metrics["max_gap"] = worst.gap;
  rep.metrics["violations"] = static_cast<double>(violations);
  rep.metrics["evaluated_points"] = static_cast<double>(evaluated);
  rep.metrics["isotropy_max_rel_dev"] = isotropy_dev;
  rep.metrics["scale_invariance_max_rel_dev"] = scale_dev;
  rep.metrics["equality_fraction"] = static_cast<double>(near_zero) / opt.sweep_points;

  rep.details["samples"] = opt.samples;
  rep.details["max_gap"] = worst.gap;
  rep.details["argmax_point"] = to_json(worst.point);
  rep.details["equality_points_x"] = equality;
  if (first_violation) rep.details["first_violation"] = violation_json(*first_violation);

  const bool harness_ok = scale_dev <= kScaleTol && isotropy_dev <= kScaleTol;
  rep.verdict = (violations == 0 && harness_ok) ? Verdict::Pass : Verdict::Fail;
  if (!harness_ok) rep.details["harness_note"] = "scale or isotropy self-check exceeded 1e-9";
  return rep;
}

InequalityCase bebu_case(const Exponent& e) {
  InequalityCase c;
  c.name = "bebu";
  c.p = e.p();
  c.lhs = IntegrandId::beurling_m(e.burkholder_norm());
  c.rhs = IntegrandId::burkholder();
  c.constant = e.c_p();
  c.constant_on = InequalityCase::Side::Rhs;
  const double k = e.burkholder_norm();
  c.special_x = {k / (1.0 + k), 0.0, 1.0};
  return c;
}

InequalityCase bebu_case_constant_left(const Exponent& e) {
  InequalityCase c = bebu_case(e);
  c.name = "bebu_constant_left";
  c.constant_on = InequalityCase::Side::Lhs;
  return c;
}

InequalityCase m_pointwise_case(const Exponent& e, double M) {
  require(M >= e.burkholder_norm() * (1.0 - 1e-15), "M_at_least_pstar_minus_one",
          "verify_m_pointwise requires M >= p* - 1");
  InequalityCase c;
  c.name = "m_pointwise";
  c.p = e.p();
  c.lhs = IntegrandId::beurling_m(M);
  c.rhs = IntegrandId::burkholder_m(M);
  c.constant = e.p() * std::pow(M / (1.0 + M), e.p() - 1.0);
  c.special_x = {M / (1.0 + M), 0.0, 1.0};
  return c;
}

InequalityCase aubert_pair_case(double M) {
  require(M >= 1.0, "M_at_least_one", "verify_aubert_pair requires M >= 1");
  InequalityCase c;
  c.name = "aubert_pair";
  c.p = 4.0;
  c.lhs = IntegrandId::beurling_m(M);
  c.rhs = IntegrandId::aubert(M);
  c.constant = 2.0 * M * M / (1.0 + M * M);
  c.special_x = {M / (1.0 + M), 0.0, 1.0};
  return c;
}

ExperimentReport verify_bebu(const Exponent& e, int samples, std::uint64_t seed) {
  VerifyOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  opt.sweep_points = 1000001;
  ExperimentReport rep = verify_case(bebu_case(e), opt);
  const ExperimentReport left = verify_case(bebu_case_constant_left(e), opt);
  rep.details["constant_left_form"] = {{"max_gap", left.metrics.at("max_gap")},
                                       {"violations", left.metrics.at("violations")},
                                       {"argmax_point", left.details.at("argmax_point")},
                                       {"verdict", to_string(left.verdict)}};
  rep.metrics["constant_left_max_gap"] = left.metrics.at("max_gap");
  rep.metrics["C_p"] = e.c_p();
  return rep;
}

ExperimentReport verify_m_pointwise(const Exponent& e, double M, int samples, std::uint64_t seed) {
  VerifyOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  return verify_case(m_pointwise_case(e, M), opt);
}

ExperimentReport verify_aubert_pair(double M, int samples, std::uint64_t seed) {
  const InequalityCase c = aubert_pair_case(M);
  VerifyOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  ExperimentReport rep = verify_case(c, opt);

  // The forced constant: c >= lhs/rhs where rhs > 0 and c <= lhs/rhs where rhs < 0.
  const Exponent four(4.0);
  double c_lower = -std::numeric_limits<double>::infinity();
  double c_upper = std::numeric_limits<double>::infinity();
  const int n = opt.sweep_points;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n, y = 1.0 - x;
    const double l = evaluate_moduli(c.lhs, four, x, y);
    const double r = evaluate_moduli(c.rhs, four, x, y);
    if (std::abs(r) < 1e-9) continue;
    const double q = l / r;
    if (r > 0) c_lower = std::max(c_lower, q);
    if (r < 0) c_upper = std::min(c_upper, q);
  }
  rep.metrics["forced_c_lower"] = c_lower;
  rep.metrics["forced_c_upper"] = c_upper;
  rep.metrics["c"] = c.constant;
  return rep;
}

ExperimentReport verify_envelope_majorant(const Exponent& e, int grid_n) {
  require(grid_n >= 16, "grid_n_at_least_16", "verify_envelope_majorant requires grid_n >= 16");
  const double k = e.burkholder_norm();
  const double p = e.p();
  const IntegrandId env = IntegrandId::envelope();
  const IntegrandId fp = IntegrandId::beurling_m(k);

  ExperimentReport rep;
  rep.name = "envelope_majorant";
  rep.parameters = {{"p", p}, {"grid_n", grid_n}, {"window", {2.0, 2.0}}};

  long violations = 0, branch_mismatch = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  json worst_point = nullptr;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const double x = 2.0 * i / (grid_n - 1), y = 2.0 * j / (grid_n - 1);
      const double s = x + y;
      if (s == 0.0) continue;
      const double norm = std::pow(s, p);
      const double ev = evaluate_moduli(env, e, x, y);
      const double fv = evaluate_moduli(fp, e, x, y);
      const double margin = (ev - fv) / norm;
      if (margin < min_margin) {
        min_margin = margin;
        worst_point = to_json(PlanarGradient::from_moduli(x, y));
      }
      if (margin < -1e-12) ++violations;
      const bool f_branch = e.at_least_two() ? (k * y >= x) : (k * y <= x);
      if (f_branch && std::abs(ev - fv) > 1e-12 * norm) ++branch_mismatch;
    }
  }

  // Interface ray x = (p*-1) y: both branch formulas agree.
  double ray_dev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double y = i / 1000.0, x = k * y;
    const double f_branch = std::pow(x, p) - std::pow(k, p) * std::pow(y, p);
    const double b_branch = e.c_p() * (x - k * y) * std::pow(x + y, p - 1.0);
    ray_dev = std::max(ray_dev, std::abs(f_branch - b_branch) / std::pow(x + y, p));
  }

  rep.metrics["violations"] = static_cast<double>(violations);
  rep.metrics["min_normalized_margin"] = min_margin;
  rep.metrics["branch_mismatches"] = static_cast<double>(branch_mismatch);
  rep.metrics["ray_max_dev"] = ray_dev;
  rep.details["argmin_point"] = worst_point;
  rep.verdict = (violations == 0 && branch_mismatch == 0 && ray_dev <= 1e-10) ? Verdict::Pass
                                                                              : Verdict::Fail;
  return rep;
}

ExperimentReport verify_cross_form(const Exponent& e, int samples, std::uint64_t seed) {
  require(samples >= 1, "samples_positive", "verify_cross_form requires samples >= 1");
  ExperimentReport rep;
  rep.name = "burkholder_cross_form";
  rep.parameters = {{"p", e.p()}, {"samples", samples}, {"seed", seed}, {"tolerance", 1e-12}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> logscale(-3.0, 3.0);
  double worst = 0.0;
  json argmax = nullptr;
  for (int i = 0; i < samples; ++i) {
    const double t = std::pow(10.0, logscale(rng));
    const PlanarGradient a{t * cplx(g(rng), g(rng)), t * cplx(g(rng), g(rng))};
    const double scale = std::pow(a.abs_xi() + a.abs_zeta(), e.p());
    const double d = std::abs(eval_burkholder(e, a) - eval_burkholder_real_form(e, a)) / scale;
    if (d > worst) {
      worst = d;
      argmax = to_json(a);
    }
  }
  rep.metrics["max_rel_diff"] = worst;
  rep.details["argmax_point"] = argmax;
  rep.verdict = worst <= 1e-12 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ExperimentReport vnorm_report(const Exponent& e) {
  ExperimentReport rep;
  rep.name = "burkholder_vnorm";
  rep.parameters = {{"p", e.p()}, {"tolerance", 1e-6}};
  const VNormResult v = vnorm(IntegrandId::burkholder(), e);
  rep.metrics["vnorm"] = v.value;
  rep.metrics["argmax_x"] = v.argmax_x;
  rep.metrics["expected"] = e.burkholder_norm();
  rep.metrics["abs_diff"] = std::abs(v.value - e.burkholder_norm());
  rep.verdict = std::abs(v.value - e.burkholder_norm()) <= 1e-6 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace rankone
