#include "rankone/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "rankone/errors.hpp"

namespace rankone {

namespace {

double rel(double residual, double scale) {
  return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual);
}

}  // namespace

IntegrandUV IntegrandUV::burkholder(double p) {
  require(p > 1.0, "p_gt_1", "burkholder integrand requires p > 1");
  IntegrandUV E;
  E.name_ = "burkholder";
  const double q = p - 1.0, K = p - 1.0;
  E.f_ = [=](double u, double v) { return (u - K * v) * std::pow(u + v, q); };
  E.jet_ = [=](double u, double v) {
    const double s = u + v, w = u - K * v;
    const double sq = std::pow(s, q), sq1 = std::pow(s, q - 1.0), sq2 = std::pow(s, q - 2.0);
    const double curv = q * (q - 1.0) * w * sq2;
    UVJet j;
    j.e = w * sq;
    j.eu = sq + q * w * sq1;
    j.ev = -K * sq + q * w * sq1;
    j.euu = 2.0 * q * sq1 + curv;
    j.euv = (1.0 - K) * q * sq1 + curv;
    j.evv = -2.0 * K * q * sq1 + curv;
    return j;
  };
  return E;
}

IntegrandUV IntegrandUV::power_u(double p) {
  IntegrandUV E;
  E.name_ = "power_u";
  E.f_ = [=](double u, double) { return std::pow(u, p); };
  E.jet_ = [=](double u, double) {
    UVJet j;
    j.e = std::pow(u, p);
    j.eu = p * std::pow(u, p - 1.0);
    j.euu = p * (p - 1.0) * std::pow(u, p - 2.0);
    return j;
  };
  return E;
}

IntegrandUV IntegrandUV::quadratic() {
  IntegrandUV E;
  E.name_ = "quadratic";
  E.f_ = [](double u, double v) { return u * u + v * v; };
  E.jet_ = [](double u, double v) {
    UVJet j;
    j.e = u * u + v * v;
    j.eu = 2.0 * u;
    j.ev = 2.0 * v;
    j.euu = j.evv = 2.0;
    return j;
  };
  return E;
}

IntegrandUV IntegrandUV::homogeneous(double p, std::vector<double> poly, double h_rel) {
  require(!poly.empty(), "coefficients", "homogeneous integrand needs polynomial coefficients");
  return from_function(
      "homogeneous",
      [p, poly = std::move(poly)](double u, double v) {
        const double s = u + v, t = u / s;
        double P = 0.0;
        for (std::size_t k = poly.size(); k-- > 0;) P = P * t + poly[k];
        return std::pow(s, p) * P;
      },
      h_rel);
}

IntegrandUV IntegrandUV::from_function(std::string name, Fn f, double h_rel) {
  require(h_rel > 0.0, "h_positive", "finite-difference step must be positive");
  IntegrandUV E;
  E.name_ = std::move(name);
  E.f_ = std::move(f);
  E.h_rel_ = h_rel;
  return E;
}

UVJet IntegrandUV::jet(double u, double v) const {
  require(u > 0.0 && v > 0.0, "open_quadrant", "E(u, v) is only used for u, v > 0");
  return jet_ ? jet_(u, v) : finite_difference_jet(u, v);
}

UVJet IntegrandUV::finite_difference_jet(double u, double v) const {
  require(u > 0.0 && v > 0.0, "open_quadrant", "E(u, v) is only used for u, v > 0");
  const double h = std::min(h_rel_ * (u + v), 0.25 * std::min(u, v));
  const auto& f = f_;
  const double f0 = f(u, v);
  const double fup = f(u + h, v), fum = f(u - h, v);
  const double fvp = f(u, v + h), fvm = f(u, v - h);
  UVJet j;
  j.e = f0;
  j.eu = (fup - fum) / (2.0 * h);
  j.ev = (fvp - fvm) / (2.0 * h);
  j.euu = (fup - 2.0 * f0 + fum) / (h * h);
  j.evv = (fvp - 2.0 * f0 + fvm) / (h * h);
  j.euv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h);
  return j;
}

PdePair pde_pair_residual(const IntegrandUV& E, double u, double v) {
  const UVJet j = E.jet(u, v);
  PdePair r;
  r.first = j.euu - 2.0 * j.euv + j.evv;
  r.second = j.euu - j.evv + 2.0 * j.ev / v;
  r.first_rel = rel(r.first, std::abs(j.euu) + 2.0 * std::abs(j.euv) + std::abs(j.evv));
  r.second_rel = rel(r.second, std::abs(j.euu) + std::abs(j.evv) + 2.0 * std::abs(j.ev / v));
  return r;
}

namespace {

ELResidual radial_point(const RadialProfile& prof, double r) {
  require(prof.has_second_derivative(), "profile_c2", "the radial equation needs rho''");
  require(r > 0.0 && r > prof.r_min() && r <= prof.R(), "r_in_domain",
          "radius must lie inside the profile's domain");
  ELResidual out;
  out.r = r;
  out.rho = prof.rho(r);
  out.drho = prof.drho(r);
  out.d2rho = prof.d2rho(r);
  require(out.rho > r * out.drho, "rho_gt_r_drho", "the radial equation is derived for rho > r rho'");
  out.u = 0.5 * (out.rho / r + out.drho);
  out.v = 0.5 * (out.rho / r - out.drho);
  require(out.u > 0.0, "u_positive", "|f_z| must be positive");
  return out;
}

}  // namespace

ELResidual radial_el_residual(const IntegrandUV& E, const RadialProfile& prof, double r) {
  ELResidual out = radial_point(prof, r);
  const UVJet j = E.jet(out.u, out.v);
  const double lhs_coef = j.euu - 2.0 * j.euv + j.evv;
  const double rhs_coef = j.euu - j.evv + 2.0 * j.ev / out.v;
  out.residual = lhs_coef * r * out.d2rho - 2.0 * rhs_coef * out.v;
  out.scale = (std::abs(j.euu) + 2.0 * std::abs(j.euv) + std::abs(j.evv)) * r * std::abs(out.d2rho) +
              2.0 * (std::abs(j.euu) + std::abs(j.evv) + 2.0 * std::abs(j.ev / out.v)) * out.v;
  return out;
}

ELResidual radial_el_residual_expanded(const IntegrandUV& E, const RadialProfile& prof, double r) {
  ELResidual out = radial_point(prof, r);
  const UVJet j = E.jet(out.u, out.v);
  const double a = out.drho / r - out.rho / (r * r);
  const double t_uu = (out.d2rho + a) * j.euu;
  const double t_uv = -2.0 * out.d2rho * j.euv;
  const double t_vv = (out.d2rho - a) * j.evv;
  const double t_v = -4.0 * j.ev / r;
  out.residual = r * (t_uu + t_uv + t_vv + t_v);
  out.scale = r * (std::abs(t_uu) + std::abs(t_uv) + std::abs(t_vv) + std::abs(t_v));
  return out;
}

std::vector<std::pair<double, double>> log_uv_grid(double lo, double hi, int n, double v_ratio) {
  require(lo > 0.0 && hi > lo && n >= 2, "grid", "log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  std::vector<std::pair<double, double>> g;
  for (double u : axis)
    for (double v : axis)
      if (v >= v_ratio * u) g.emplace_back(u, v);
  return g;
}

ExperimentReport pde_pair_grid_report(const IntegrandUV& E,
                                      const std::vector<std::pair<double, double>>& grid, double tol) {
  ExperimentReport rep;
  rep.name = "pde_pair_residual";
  rep.parameters = {{"integrand", E.name()},
                    {"analytic_derivatives", E.analytic()},
                    {"grid_points", grid.size()},
                    {"tolerance", tol}};
  double m1 = 0.0, m2 = 0.0;
  std::pair<double, double> arg1{}, arg2{};
  for (const auto& [u, v] : grid) {
    const PdePair r = pde_pair_residual(E, u, v);
    if (r.first_rel > m1) m1 = r.first_rel, arg1 = {u, v};
    if (r.second_rel > m2) m2 = r.second_rel, arg2 = {u, v};
  }
  rep.metrics["max_first_rel"] = m1;
  rep.metrics["max_second_rel"] = m2;
  rep.details["argmax_first"] = {arg1.first, arg1.second};
  rep.details["argmax_second"] = {arg2.first, arg2.second};
  rep.verdict = m1 <= tol && m2 <= tol ? Verdict::Pass : Verdict::Fail;
  return rep;
}

void write_residual_csv(const IntegrandUV& E, const std::vector<std::pair<double, double>>& grid,
                        const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open CSV file '" + path.string() + "' for writing");
  os << "u,v,first,second,first_rel,second_rel\n";
  char buf[256];
  for (const auto& [u, v] : grid) {
    const PdePair r = pde_pair_residual(E, u, v);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", u, v, r.first, r.second,
                  r.first_rel, r.second_rel);
    os << buf;
  }
  if (!os) throw std::runtime_error("failed writing CSV file '" + path.string() + "'");
}

std::vector<RadialProfile> c2_test_profiles() {
  return {RadialProfile::power(1.0, 0.5, 1.0),          RadialProfile::power(1.0, 0.4, 1.0),
          RadialProfile::power(1.0, 0.9, 1.0),          RadialProfile::power(2.0, -0.5, 1.0),
          RadialProfile::power(1.0, 0.0, 1.0),          RadialProfile::polynomial({1.0, -0.3}, 1.0),
          RadialProfile::polynomial({1.0, 0.0, -0.2}, 1.0),
          RadialProfile::polynomial({2.0, -0.5, 0.1}, 1.0)};
}

ExperimentReport radial_el_report(double p, const std::vector<RadialProfile>& profiles, int samples,
                                  double tol) {
  ExperimentReport rep;
  rep.name = "radial_el_residual";
  json profs = json::array();
  for (const auto& pr : profiles) profs.push_back(pr.to_json());
  rep.parameters = {{"p", p}, {"profiles", profs}, {"samples", samples}, {"tolerance", tol}};
  const IntegrandUV E = IntegrandUV::burkholder(p);
  double worst = 0.0, worst_expanded = 0.0;
  json per = json::array();
  for (const auto& pr : profiles) {
    double m = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double r = pr.r_min() + (pr.R() - pr.r_min()) * k / (samples + 1.0);
      m = std::max(m, radial_el_residual(E, pr, r).relative());
      worst_expanded = std::max(worst_expanded, radial_el_residual_expanded(E, pr, r).relative());
    }
    per.push_back(m);
    worst = std::max(worst, m);
  }
  rep.details["per_profile_max_rel"] = per;
  rep.metrics["max_rel"] = worst;
  rep.metrics["max_rel_expanded"] = worst_expanded;
  rep.verdict = worst <= tol && worst_expanded <= tol ? Verdict::Pass : Verdict::Fail;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct OdeParams {
  double p;
};

double coef_a(double p, double xi) { return p * std::pow(xi, p - 1.0); }
double coef_a_prime(double p, double xi) { return p * (p - 1.0) * std::pow(xi, p - 2.0); }

int ode_rhs(double xi, const double*, double* dy, void* params) {
  const double p = static_cast<OdeParams*>(params)->p;
  dy[0] = coef_a(p, xi) - xi * coef_a_prime(p, xi);
  return GSL_SUCCESS;
}

struct DriverDeleter {
  void operator()(gsl_odeiv2_driver* d) const { gsl_odeiv2_driver_free(d); }
};

// B at each target, integrating outward from xi = 1 in the given order.
std::vector<double> integrate_b(double p, const std::vector<double>& targets) {
  OdeParams params{p};
  gsl_odeiv2_system sys{&ode_rhs, nullptr, 1, &params};
  std::vector<double> out;
  const double h0 = targets.empty() || targets.front() >= 1.0 ? 1e-3 : -1e-3;
  std::unique_ptr<gsl_odeiv2_driver, DriverDeleter> drv(
      gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_rk8pd, h0, 1e-14, 1e-14));
  double xi = 1.0, y = 2.0 - p;
  for (double t : targets) {
    if (t != xi) {
      const int status = gsl_odeiv2_driver_apply(drv.get(), &xi, t, &y);
      if (status != GSL_SUCCESS)
        throw NonConvergenceError("ODE integration failed at xi = " + std::to_string(xi), xi);
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace

ExperimentReport ode_reduction_check(double p) {
  require(p > 1.0, "p_gt_1", "ode_reduction_check requires p > 1");
  gsl_set_error_handler_off();
  ExperimentReport rep;
  rep.name = "ode_reduction_check";
  const int n_xi = 31, n_zeta = 21;
  rep.parameters = {{"p", p},
                    {"xi_range", {0.5, 2.0}},
                    {"xi_samples", n_xi},
                    {"zeta_samples", n_zeta},
                    {"stepper", "rk8pd"},
                    {"normalization", "E = Phi / 2"},
                    {"tolerance", 1e-8}};

  std::vector<double> xi(n_xi);
  for (int i = 0; i < n_xi; ++i) xi[i] = 0.5 + 1.5 * i / (n_xi - 1);
  std::vector<double> up, down;
  for (double x : xi) (x >= 1.0 ? up : down).push_back(x);
  std::reverse(down.begin(), down.end());
  std::vector<double> b_up = integrate_b(p, up), b_down = integrate_b(p, down);
  std::reverse(b_down.begin(), b_down.end());
  std::vector<double> B = b_down;
  B.insert(B.end(), b_up.begin(), b_up.end());

  double b_err = 0.0;
  for (int i = 0; i < n_xi; ++i)
    b_err = std::max(b_err, std::abs(B[i] - (2.0 - p) * std::pow(xi[i], p)) / std::pow(xi[i], p));

  // For p < 2 the (p-1) form is -(p-1) times B_p with the moduli swapped,
  // i.e. B_p of the conjugate map.
  const Exponent e(p);
  const IntegrandId burk = IntegrandId::burkholder();
  const IntegrandUV E = IntegrandUV::burkholder(p);
  double rec_err = 0.0, kernel_err = 0.0;
  for (int i = 0; i < n_xi; ++i) {
    for (int j = 0; j < n_zeta; ++j) {
      const double zeta = xi[i] * (-1.0 + 2.0 * j / (n_zeta - 1));
      const double u = 0.5 * (xi[i] + zeta), v = 0.5 * (xi[i] - zeta);
      const double phi = coef_a(p, xi[i]) * zeta + B[i];
      const double scale = std::pow(xi[i], p);
      rec_err = std::max(rec_err, std::abs(0.5 * phi - E(u, v)) / scale);
      const double kernel = e.at_least_two() ? evaluate_moduli(burk, e, u, v)
                                             : -(p - 1.0) * evaluate_moduli(burk, e, v, u);
      kernel_err = std::max(kernel_err, std::abs(0.5 * phi - kernel) / scale);
    }
  }
  rep.metrics["b_max_rel_error"] = b_err;
  rep.metrics["reconstruction_max_rel_error"] = rec_err;
  rep.metrics["kernel_form_max_rel_error"] = kernel_err;
  rep.details["kernel_form"] = e.at_least_two() ? "B_p(u, v)" : "-(p-1) B_p(v, u)";
  rep.verdict = b_err <= 1e-8 && rec_err <= 1e-8 && kernel_err <= 1e-8 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ExperimentReport uniqueness_probe(double p, int count, std::uint64_t seed, double threshold) {
  require(p > 1.0 && count >= 1, "p_gt_1", "uniqueness_probe requires p > 1 and count >= 1");
  ExperimentReport rep;
  rep.name = "uniqueness_probe";
  const auto grid = log_uv_grid(1e-2, 1e2, 9);
  rep.parameters = {{"p", p},
                    {"count", count},
                    {"seed", seed},
                    {"threshold", threshold},
                    {"grid", {{"lo", 1e-2}, {"hi", 1e2}, {"n", 9}, {"v_ratio", 1e-3}}}};

  auto worst = [&](const IntegrandUV& E) {
    double m = 0.0;
    for (const auto& [u, v] : grid) {
      const PdePair r = pde_pair_residual(E, u, v);
      m = std::max({m, r.first_rel, r.second_rel});
    }
    return m;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  json cases = json::array();
  int detected = 0;
  double weakest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    std::vector<double> c{gauss(rng), gauss(rng), gauss(rng), 0.0};
    // A nonzero cubic term keeps P away from the linear Burkholder profile.
    c[3] = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + unit(rng));
    const double m = worst(IntegrandUV::homogeneous(p, c));
    detected += m > threshold;
    weakest = std::min(weakest, m);
    cases.push_back({{"coefficients", c}, {"max_rel_residual", m}});
  }
  // The same finite-difference path applied to Burkholder itself.
  const double K = p - 1.0;
  const double control =
      worst(IntegrandUV::homogeneous(p, {-K, p}));  // (u+v)^p (p t - (p-1)) = [u - (p-1)v](u+v)^(p-1)
  rep.details["cases"] = cases;
  rep.metrics["detected"] = detected;
  rep.metrics["weakest_max_residual"] = weakest;
  rep.metrics["control_max_residual"] = control;
  rep.verdict = detected == count && control <= 1e-5 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace rankone
