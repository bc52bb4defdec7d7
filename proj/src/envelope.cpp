#include "rankone/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rankone {

ModuliGrid::ModuliGrid(int nx_, int ny_, double x_max_, double y_max_)
    : nx(nx_), ny(ny_), x_max(x_max_), y_max(y_max_) {
  require(nx >= 33 && ny >= 33, "grid_size", "ModuliGrid requires nx, ny >= 33");
  require(x_max > 0.0 && y_max > 0.0, "grid_extent", "ModuliGrid requires positive extents");
  values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
}

void ModuliGrid::validate() const {
  require(nx >= 33 && ny >= 33, "grid_size", "ModuliGrid requires nx, ny >= 33");
  require(values.size() == static_cast<std::size_t>(nx) * ny, "grid_storage",
          "ModuliGrid storage does not match nx * ny");
  require(std::abs(dx() - dy()) <= 1e-12 * std::max(dx(), dy()), "grid_spacing",
          "zig-zag sweeps need equal spacing in x and y");
  for (double v : values) require(std::isfinite(v), "grid_finite", "ModuliGrid values must be finite");
}

ModuliGrid sample_grid(const IntegrandId& id, const Exponent& e, int nx, int ny, double x_max,
                       double y_max) {
  ModuliGrid g(nx, ny, x_max, y_max);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) g.at(i, j) = evaluate_moduli(id, e, g.x(i), g.y(j));
  return g;
}

namespace {

// Upper concave hull of (k, v[k]) for unit-spaced k; overwrites v with the
// hull's values.
void upper_hull_in_place(std::vector<double>& v, std::vector<int>& stack) {
  const int m = static_cast<int>(v.size());
  if (m < 3) return;
  stack.clear();
  for (int k = 0; k < m; ++k) {
    while (stack.size() >= 2) {
      const int a = stack[stack.size() - 2], b = stack.back();
      // Drop b if it lies on or below the chord a-k.
      const double cross = (v[b] - v[a]) * (k - a) - (v[k] - v[a]) * (b - a);
      if (cross <= 0.0) {
        stack.pop_back();
      } else {
        break;
      }
    }
    stack.push_back(k);
  }
  for (std::size_t s = 0; s + 1 < stack.size(); ++s) {
    const int a = stack[s], b = stack[s + 1];
    const double va = v[a], vb = v[b];
    for (int k = a + 1; k < b; ++k) v[k] = va + (vb - va) * (k - a) / (b - a);
  }
}

}  // namespace

double zigzag_concavify_in_place(ModuliGrid& g) {
  const int xi = g.nx - 1, yj = g.ny - 1;
  double change = 0.0;
  std::vector<double> path;
  std::vector<int> stack;
  // The unfolded line zeta = xi - c visits (i, i - c); folded it visits
  // (|i|, |i - c|). c >= 0 suffices by symmetry. Lines stop at the window edge,
  // so their end values stay fixed.
  for (int c = 0; c <= xi + yj; ++c) {
    const int lo = std::max(-xi, c - yj);
    const int hi = std::min(xi, c + yj);
    if (hi - lo < 2) continue;
    path.resize(hi - lo + 1);
    for (int i = lo; i <= hi; ++i) path[i - lo] = g.at(std::abs(i), std::abs(i - c));
    upper_hull_in_place(path, stack);
    for (int i = lo; i <= hi; ++i) {
      double& node = g.at(std::abs(i), std::abs(i - c));
      const double nv = std::max(node, path[i - lo]);
      change = std::max(change, nv - node);
      node = nv;
    }
  }
  return change;
}

ModuliGrid zigzag_concavify_step(const ModuliGrid& g) {
  g.validate();
  ModuliGrid out = g;
  zigzag_concavify_in_place(out);
  return out;
}

std::pair<ModuliGrid, EnvelopeRun> compute_envelope(const IntegrandId& id, const Exponent& e,
                                                    int nx, int ny, double x_max, double y_max,
                                                    double tol, int max_iter) {
  require(tol > 0.0, "tol_positive", "compute_envelope requires tol > 0");
  require(max_iter >= 1, "max_iter", "compute_envelope requires max_iter >= 1");
  ModuliGrid g = sample_grid(id, e, nx, ny, x_max, y_max);
  g.validate();
  EnvelopeRun run;
  while (run.iterations < max_iter) {
    const double change = zigzag_concavify_in_place(g);
    ++run.iterations;
    run.sup_change_history.push_back(change);
    if (change < tol) {
      run.converged = true;
      break;
    }
  }
  return {std::move(g), std::move(run)};
}

double envelope_error(const ModuliGrid& g, const Exponent& e, double fraction) {
  const IntegrandId env = IntegrandId::envelope();
  double err = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    if (g.x(i) > fraction * g.x_max * (1 + 1e-12)) break;
    for (int j = 0; j < g.ny; ++j) {
      if (g.y(j) > fraction * g.y_max * (1 + 1e-12)) break;
      err = std::max(err, std::abs(g.at(i, j) - evaluate_moduli(env, e, g.x(i), g.y(j))));
    }
  }
  return err;
}

void write_grid_csv(const ModuliGrid& g, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open CSV file '" + path.string() + "' for writing");
  char buf[40];
  os << "y\\x";
  for (int i = 0; i < g.nx; ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g", g.x(i));
    os << buf;
  }
  os << '\n';
  for (int j = 0; j < g.ny; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", g.y(j));
    os << buf;
    for (int i = 0; i < g.nx; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", g.at(i, j));
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing CSV file '" + path.string() + "'");
}

ExperimentReport envelope_convergence_study(const Exponent& e, const std::vector<int>& sizes,
                                            double tol, int max_iter) {
  ExperimentReport rep;
  rep.name = "envelope_convergence";
  rep.parameters = {{"p", e.p()},         {"sizes", sizes}, {"window", {2.0, 2.0}},
                    {"tol", tol},         {"max_iter", max_iter},
                    {"validation_window", "inner half"}};
  const IntegrandId fp = IntegrandId::beurling_m(e.burkholder_norm());
  json runs = json::array();
  std::vector<double> errors;
  bool all_converged = true;
  for (int n : sizes) {
    auto [grid, run] = compute_envelope(fp, e, n, n, 2.0, 2.0, tol, max_iter);
    const double err = envelope_error(grid, e, 0.5);
    errors.push_back(err);
    all_converged = all_converged && run.converged;
    runs.push_back({{"n", n},
                    {"iterations", run.iterations},
                    {"converged", run.converged},
                    {"final_change", run.sup_change_history.back()},
                    {"inner_sup_error", err},
                    {"full_sup_error", envelope_error(grid, e, 1.0)}});
  }
  bool monotone = true;
  for (std::size_t k = 1; k < errors.size(); ++k) monotone = monotone && errors[k] < errors[k - 1];
  rep.details["runs"] = runs;
  rep.metrics["finest_inner_sup_error"] = errors.empty() ? 0.0 : errors.back();
  rep.metrics["monotone_refinement"] = monotone ? 1.0 : 0.0;
  rep.verdict = (all_converged && monotone && !errors.empty() && errors.back() <= 5e-3)
                    ? Verdict::Pass
                    : Verdict::Fail;
  return rep;
}

}  // namespace rankone
