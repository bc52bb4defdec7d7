#include "quadrature.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "rankone/errors.hpp"

namespace rankone::detail {

namespace {

constexpr std::size_t kWorkspace = 2000;

void silence_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

void check(int status, double abserr, const char* routine) {
  if (status == GSL_SUCCESS) return;
  throw NonConvergenceError(std::string(routine) + " did not converge: " + gsl_strerror(status) +
                                " (achieved abs error " + std::to_string(abserr) + ")",
                            abserr);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double epsrel,
                     double epsabs) {
  silence_gsl();
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> w(
      gsl_integration_workspace_alloc(kWorkspace));
  gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
  QuadResult r;
  const int status =
      gsl_integration_qags(&gf, a, b, epsabs, epsrel, kWorkspace, w.get(), &r.value, &r.abserr);
  check(status, r.abserr, "QAGS");
  return r;
}

QuadResult integrate_with_breaks(const std::function<double(double)>& f, std::vector<double> pts,
                                 double epsrel, double epsabs) {
  silence_gsl();
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() == 2) return integrate(f, pts[0], pts[1], epsrel, epsabs);
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> w(
      gsl_integration_workspace_alloc(kWorkspace));
  gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
  QuadResult r;
  const int status = gsl_integration_qagp(&gf, pts.data(), pts.size(), epsabs, epsrel, kWorkspace,
                                          w.get(), &r.value, &r.abserr);
  check(status, r.abserr, "QAGP");
  return r;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  silence_gsl();
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &nodes[i], &weights[i], t);
  gsl_integration_glfixed_table_free(t);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace rankone::detail
