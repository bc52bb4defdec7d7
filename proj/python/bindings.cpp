#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankone/beurling.hpp"
#include "rankone/cli.hpp"
#include "rankone/envelope.hpp"
#include "rankone/euler_lagrange.hpp"
#include "rankone/inequality.hpp"
#include "rankone/kernel.hpp"
#include "rankone/probe.hpp"
#include "rankone/radial.hpp"

namespace py = pybind11;
using namespace rankone;

namespace {

// Reports cross the boundary as canonical JSON text; the package decodes them.
std::string dump(const ExperimentReport& r) { return canonical_json(r.to_json()); }

IntegrandId integrand(const std::string& name, double M, double lambda, int sign) {
  return IntegrandId::parse(name, M, lambda, sign);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rank-one concave integrand workbench";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);

  m.def(
      "eval",
      [](const std::string& name, double p, cplx xi, cplx zeta, double M, double lambda, int sign) {
        return evaluate(integrand(name, M, lambda, sign), Exponent(p), PlanarGradient(xi, zeta));
      },
      py::arg("integrand"), py::arg("p"), py::arg("xi"), py::arg("zeta"), py::arg("M") = 0.0,
      py::arg("lam") = 0.0, py::arg("sign") = 1);

  m.def(
      "burkholder_real_form",
      [](double p, cplx xi, cplx zeta) {
        return eval_burkholder_real_form(Exponent(p), PlanarGradient(xi, zeta));
      },
      py::arg("p"), py::arg("xi"), py::arg("zeta"));

  m.def(
      "vnorm",
      [](const std::string& name, double p, double M) {
        auto r = vnorm(integrand(name, M, 0.0, 1), Exponent(p));
        return py::make_tuple(r.value, r.argmax_x);
      },
      py::arg("integrand") = "burkholder", py::arg("p") = 2.0, py::arg("M") = 0.0);

  m.def(
      "verify",
      [](const std::string& which, double p, double M, int samples, std::uint64_t seed) {
        Exponent e(p);
        if (which == "bebu") return dump(verify_bebu(e, samples, seed));
        if (which == "m_pointwise") return dump(verify_m_pointwise(e, M, samples, seed));
        if (which == "aubert") return dump(verify_aubert_pair(M, samples, seed));
        if (which == "cross_form") return dump(verify_cross_form(e, samples, seed));
        if (which == "vnorm") return dump(vnorm_report(e));
        throw PreconditionError("verify_case", "unknown case '" + which + "'");
      },
      py::arg("case"), py::arg("p") = 3.0, py::arg("M") = 0.0, py::arg("samples") = 10000,
      py::arg("seed") = 1);

  m.def(
      "probe",
      [](const std::string& name, double p, double M, int base_count, int phase_count, int t_count) {
        ProbeConfig cfg;
        cfg.base_count = base_count;
        cfg.phase_count = phase_count;
        cfg.t_count = t_count;
        auto id = integrand(name, M, 0.0, 1);
        Exponent e(p);
        return dump(to_report(id, e, cfg, probe_rank_one_concavity(id, e, cfg)));
      },
      py::arg("integrand"), py::arg("p"), py::arg("M") = 0.0, py::arg("base_count") = 101,
      py::arg("phase_count") = 32, py::arg("t_count") = 41);

  m.def(
      "envelope_error",
      [](double p, int n, double tol, int max_iter) {
        Exponent e(p);
        auto [grid, run] = compute_envelope(IntegrandId::beurling_m(e.burkholder_norm()), e, n, n,
                                            2.0, 2.0, tol, max_iter);
        return py::make_tuple(envelope_error(grid, e), run.iterations, run.converged);
      },
      py::arg("p"), py::arg("n") = 65, py::arg("tol") = 1e-6, py::arg("max_iter") = 100000);

  m.def(
      "radial_energy",
      [](const std::string& profile_json, double p) {
        auto prof = RadialProfile::from_json(json::parse(profile_json));
        return dump(energy_identity_report(prof, Exponent(p)));
      },
      py::arg("profile"), py::arg("p"));

  m.def(
      "example_11",
      [](double p, double R, double r_outer) { return dump(example_11_energy(Exponent(p), R, r_outer)); },
      py::arg("p"), py::arg("R") = 1.0, py::arg("r_outer") = 4.0);

  m.def(
      "pde_residuals",
      [](double p, double u, double v) {
        auto r = pde_pair_residual(IntegrandUV::burkholder(p), u, v);
        return py::make_tuple(r.first_rel, r.second_rel);
      },
      py::arg("p"), py::arg("u"), py::arg("v"));

  m.def(
      "beurling_ratio",
      [](double p, double alpha, int n, double L) {
        auto fam = PowerFamily::for_exponent(p, alpha);
        return lp_ratio(fam.sample_dbar(n, L), p, alpha).ratio;
      },
      py::arg("p"), py::arg("alpha"), py::arg("n") = 256, py::arg("L") = 40.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"rankone"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"));
}
