#pragma once

#include <filesystem>
#include <vector>

#include "rankone/kernel.hpp"
#include "rankone/report.hpp"

namespace rankone {

/// Samples of an isotropic function at moduli (x_i, y_j) = (|xi|, |zeta|) on
/// [0, x_max] x [0, y_max]. Storage is row-major in i.
struct ModuliGrid {
  int nx = 0;
  int ny = 0;
  double x_max = 0.0;
  double y_max = 0.0;
  std::vector<double> values;

  ModuliGrid() = default;
  ModuliGrid(int nx_, int ny_, double x_max_, double y_max_);

  double dx() const { return x_max / (nx - 1); }
  double dy() const { return y_max / (ny - 1); }
  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dy(); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * ny + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * ny + j]; }

  /// nx, ny >= 33, positive extents, equal spacing, finite values.
  void validate() const;
};

struct EnvelopeRun {
  int iterations = 0;
  std::vector<double> sup_change_history;
  bool converged = false;
};

ModuliGrid sample_grid(const IntegrandId& id, const Exponent& e, int nx, int ny, double x_max,
                       double y_max);

/// One Gauss-Seidel sweep of upper-hull replacement along every diagonal
/// lattice line of the moduli plane. Lines are taken in the real (xi, zeta)
/// plane and folded into the quadrant by |.|, so lines of both diagonal
/// families reflect into each other at the axes and one family of folded paths
/// covers every +pi/4 and -pi/4 line. Lines end at the window edge and keep
/// their end values. Returns the sup-norm change.
double zigzag_concavify_in_place(ModuliGrid& g);
ModuliGrid zigzag_concavify_step(const ModuliGrid& g);

/// Iterates sweeps until the sup change drops below tol or max_iter sweeps ran.
std::pair<ModuliGrid, EnvelopeRun> compute_envelope(const IntegrandId& id, const Exponent& e,
                                                    int nx, int ny, double x_max, double y_max,
                                                    double tol = 1e-6, int max_iter = 100000);

/// sup |grid - closed-form envelope| over nodes with x <= fraction * x_max and
/// y <= fraction * y_max.
double envelope_error(const ModuliGrid& g, const Exponent& e, double fraction = 0.5);

/// CSV: header "y\x" then the x coordinates; one row per y_j.
void write_grid_csv(const ModuliGrid& g, const std::filesystem::path& path);

/// Runs F_p at the given grid sizes on [0, 2]^2 and reports inner-window
/// errors against the closed form and whether they decrease with refinement.
ExperimentReport envelope_convergence_study(const Exponent& e, const std::vector<int>& sizes,
                                            double tol = 1e-6, int max_iter = 100000);

}  // namespace rankone
