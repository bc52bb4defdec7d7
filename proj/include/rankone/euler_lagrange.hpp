#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rankone/radial.hpp"
#include "rankone/report.hpp"

namespace rankone {

/// Value and partial derivatives of E(u, v) at one point.
struct UVJet {
  double e = 0, eu = 0, ev = 0, euu = 0, euv = 0, evv = 0;
};

/// An isotropic integrand written in the moduli u = |f_z|, v = |f_zbar|,
/// used on the open quadrant only. Named families carry exact derivatives;
/// anything built from a bare function falls back to central differences
/// with step h_rel * (u + v).
class IntegrandUV {
 public:
  using Fn = std::function<double(double, double)>;

  /// [u - (p-1) v] (u + v)^(p-1)
  static IntegrandUV burkholder(double p);
  /// u^p
  static IntegrandUV power_u(double p);
  /// u^2 + v^2
  static IntegrandUV quadratic();
  /// (u + v)^p P(u / (u + v)) with P given by ascending coefficients;
  /// differentiated numerically.
  static IntegrandUV homogeneous(double p, std::vector<double> poly, double h_rel = 1e-5);
  static IntegrandUV from_function(std::string name, Fn f, double h_rel = 1e-5);

  double operator()(double u, double v) const { return f_(u, v); }
  /// Analytic jet when available, finite differences otherwise.
  UVJet jet(double u, double v) const;
  UVJet finite_difference_jet(double u, double v) const;
  bool analytic() const { return static_cast<bool>(jet_); }
  const std::string& name() const { return name_; }
  double h_rel() const { return h_rel_; }

 private:
  std::string name_;
  Fn f_;
  std::function<UVJet(double, double)> jet_;
  double h_rel_ = 1e-5;
};

/// (E_uu - 2 E_uv + E_vv, E_uu - E_vv + 2 E_v / v).
struct PdePair {
  double first = 0, second = 0;
  /// Each residual divided by the sum of the magnitudes of its terms.
  double first_rel = 0, second_rel = 0;
};

PdePair pde_pair_residual(const IntegrandUV& E, double u, double v);

struct ELResidual {
  double r = 0, rho = 0, drho = 0, d2rho = 0;
  double u = 0, v = 0;
  double residual = 0;
  /// Sum of magnitudes of the terms on both sides.
  double scale = 0;
  double relative() const { return scale > 0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// (E_uu - 2E_uv + E_vv) r rho'' - 2 (E_uu - E_vv + 2 E_v / v) v with
/// u = (rho/r + rho')/2, v = (rho/r - rho')/2. Requires rho > r rho', u > 0
/// and a profile with rho''.
ELResidual radial_el_residual(const IntegrandUV& E, const RadialProfile& prof, double r);
/// The same equation before substituting 2v = rho/r - rho': r times
/// (rho'' + rho'/r - rho/r^2) E_uu - 2 rho'' E_uv + (rho'' - rho'/r + rho/r^2) E_vv - 4 E_v / r.
ELResidual radial_el_residual_expanded(const IntegrandUV& E, const RadialProfile& prof, double r);

/// Log-spaced grid on [lo, hi]^2 keeping only v >= v_ratio * u.
std::vector<std::pair<double, double>> log_uv_grid(double lo, double hi, int n, double v_ratio = 1e-3);

/// Max relative PDE-pair residuals over the grid; passes when both are <= tol.
ExperimentReport pde_pair_grid_report(const IntegrandUV& E,
                                      const std::vector<std::pair<double, double>>& grid, double tol);
/// Columns u, v, first, second, first_rel, second_rel.
void write_residual_csv(const IntegrandUV& E, const std::vector<std::pair<double, double>>& grid,
                        const std::filesystem::path& path);

/// C^2 profiles on (0, 1] with rho > r rho' and rho/r + rho' > 0.
std::vector<RadialProfile> c2_test_profiles();

/// Max relative radial residual of the Burkholder integrand over interior
/// radii of each profile; passes when <= tol.
ExperimentReport radial_el_report(double p, const std::vector<RadialProfile>& profiles,
                                  int samples = 64, double tol = 1e-8);

/// Integrates B' = A - xi A' with A = p xi^(p-1), B(1) = 2 - p, compares B with
/// (2 - p) xi^p on [0.5, 2] and checks Phi(u+v, u-v)/2 against the Burkholder
/// integrand on a (u, v) grid.
ExperimentReport ode_reduction_check(double p);

/// `count` random integrands (u+v)^p P(u/(u+v)) with cubic P; each must have
/// a relative PDE-pair residual above `threshold` somewhere on the grid.
ExperimentReport uniqueness_probe(double p, int count, std::uint64_t seed, double threshold = 1e-4);

}  // namespace rankone
