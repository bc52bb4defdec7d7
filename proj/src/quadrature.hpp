#pragma once

// Thin wrappers over GSL quadrature used by the radial and Euler-Lagrange
// modules. Not part of the public headers.

#include <functional>
#include <vector>

namespace rankone::detail {

struct QuadResult {
  double value = 0.0;
  double abserr = 0.0;
};

/// Adaptive Gauss-Kronrod with extrapolation (QAGS) on [a, b]; tolerates
/// integrable endpoint singularities. Throws NonConvergenceError carrying the
/// achieved error estimate when GSL gives up.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double epsrel,
                     double epsabs = 0.0);

/// QAGP: like integrate() but with known interior break points.
QuadResult integrate_with_breaks(const std::function<double(double)>& f, std::vector<double> pts,
                                 double epsrel, double epsabs = 0.0);

/// n-point Gauss-Legendre rule mapped to [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Pairwise summation, so the rounding pattern depends only on the order of
/// the input.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace rankone::detail
