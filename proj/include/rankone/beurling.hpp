#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rankone/radial.hpp"
#include "rankone/report.hpp"

namespace rankone {

/// n x n complex samples at the cell centres of the torus [-L/2, L/2)^2.
/// values[iy * n + ix] sits at (x(ix), x(iy)).
struct GridField {
  int n = 0;
  double L = 0.0;
  std::vector<cplx> values;

  GridField() = default;
  GridField(int n, double L);
  static GridField sample(int n, double L, const std::function<cplx(cplx)>& f);

  double h() const { return L / n; }
  double x(int i) const { return -0.5 * L + (i + 0.5) * h(); }
  cplx point(int ix, int iy) const { return {x(ix), x(iy)}; }
  cplx& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * n + ix]; }
  const cplx& at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * n + ix]; }
  /// n a power of two >= 64, L > 0, finite samples.
  void validate() const;
};

/// Signed integer frequency of FFT index j (Nyquist maps to -n/2).
int fft_frequency(int j, int n);

/// Unnormalized forward DFT, same layout as the field.
std::vector<cplx> fourier_coefficients(const GridField& f);
/// Inverse of fourier_coefficients.
GridField from_fourier(int n, double L, const std::vector<cplx>& coeffs);

/// Fourier multiplier conj(kappa)/kappa, zero at kappa = 0.
GridField beurling_apply(const GridField& w);
/// d/dzbar and d/dz with symbols (i/2) kappa and (i/2) conj(kappa); the
/// Nyquist row and column are dropped.
GridField spectral_dbar(const GridField& f);
GridField spectral_d(const GridField& f);

/// (sum |w|^p h^2)^(1/p), pairwise summed.
double lp_norm(const GridField& w, double p);
double l2_distance(const GridField& a, const GridField& b);

struct NormEstimate {
  double p = 0.0;
  double ratio = 0.0;
  double family_parameter = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  double L = 0.0;
  json to_json() const;
};

/// ||S w||_p / ||w||_p on the grid.
NormEstimate lp_ratio(const GridField& w, double p,
                      double family_parameter = std::numeric_limits<double>::quiet_NaN());

/// Radial stretching with rho = r^alpha for r < R, continued by
/// R^(alpha+1)/r, the two pieces blended by a C-infinity step across
/// [R - delta, R + delta]. Plus orientation for p >= 2 (then d f vanishes
/// outside the blend), minus for p < 2 (then dbar f vanishes outside).
struct PowerFamily {
  double alpha = 0.6;
  double R = 1.0;
  double delta = 0.1;
  Orientation orientation = Orientation::Plus;

  static PowerFamily for_exponent(double p, double alpha, double R = 1.0);
  /// (f_z, f_zbar) at z != 0.
  std::pair<cplx, cplx> derivatives(cplx z) const;
  GridField sample_dbar(int n, double L) const;
  GridField sample_d(int n, double L) const;
  /// ||f_z||_p / ||f_zbar||_p for the unblended map on the whole plane.
  double continuum_ratio(double p) const;
};

/// The open integrability window (1 - 2/p, 1) for alpha.
std::pair<double, double> alpha_window(double p);
std::vector<double> default_alpha_grid(double p);

/// lp_ratio of S applied to dbar f for each alpha of the family.
std::vector<NormEstimate> norm_lower_bound_scan(double p, const std::vector<double>& alpha_grid, int n,
                                                double L, double R = 1.0);

/// Scan at n and n/2. Reports the best ratio at n, the per-alpha change
/// between resolutions, and fails if any ratio exceeds (p* - 1)(1 + 0.05).
/// Writes (alpha, ratio, n, L) rows when csv is given.
ExperimentReport beurling_scan_report(double p, const std::vector<double>& alpha_grid, int n,
                                      double L, const std::optional<std::filesystem::path>& csv = {});

/// Plancherel, the mode-by-mode square of the multiplier and S dbar f = d f
/// on a seeded band-limited field.
ExperimentReport beurling_identity_report(int n, double L, std::uint64_t seed);

/// Relative L^2 distance between S(dbar f) and d f for the blended family,
/// sampled analytically, at each n.
ExperimentReport blended_map_refinement(double p, double alpha, const std::vector<int>& sizes, double L);

}  // namespace rankone
