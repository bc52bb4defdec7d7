#include "rankone/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rankone {

void ProbeConfig::validate() const {
  require(h >= 1e-6 && h <= 1e-2, "h_range", "probe step h must lie in [1e-6, 1e-2]");
  require(tol > 0.0, "tol_positive", "probe tol must be positive");
  require(phase_count >= 1, "phase_count", "phase_count must be >= 1");
  require(t_count >= 1, "t_count", "t_count must be >= 1");
  require(t_range >= 0.0, "t_range", "t_range must be >= 0");
  require(base_count >= 0, "base_count", "base_count must be >= 0");
  require(base_x_min >= 0.0 && base_x_max <= 1.0 && base_x_min <= base_x_max, "base_range",
          "base x range must satisfy 0 <= x_min <= x_max <= 1");
  require(base_count > 0 || !base_points.empty(), "base_points", "probe needs base points");
}

double second_difference(const IntegrandId& id, const Exponent& e, const PlanarGradient& a,
                         const PlanarGradient& x, double t, double h) {
  require(h > 0.0, "h_positive", "second_difference requires h > 0");
  const double fp = evaluate(id, e, a + x * (t + h));
  const double f0 = evaluate(id, e, a + x * t);
  const double fm = evaluate(id, e, a + x * (t - h));
  return (fp - 2.0 * f0 + fm) / (h * h);
}

namespace {

std::vector<PlanarGradient> base_set(const ProbeConfig& cfg) {
  std::vector<PlanarGradient> out;
  for (int i = 0; i < cfg.base_count; ++i) {
    const double x = cfg.base_count == 1
                         ? cfg.base_x_min
                         : cfg.base_x_min + (cfg.base_x_max - cfg.base_x_min) * i / (cfg.base_count - 1);
    out.push_back(PlanarGradient::from_moduli(x, 1.0 - x));
  }
  out.insert(out.end(), cfg.base_points.begin(), cfg.base_points.end());
  return out;
}

}  // namespace

ProbeResult probe_rank_one_concavity(const IntegrandId& id, const Exponent& e,
                                     const ProbeConfig& cfg) {
  cfg.validate();
  const auto bases = base_set(cfg);
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<PlanarGradient> dirs;
  dirs.reserve(static_cast<std::size_t>(cfg.phase_count) * cfg.phase_count);
  for (int i = 0; i < cfg.phase_count; ++i) {
    for (int j = 0; j < cfg.phase_count; ++j) {
      dirs.emplace_back(std::polar(1.0, two_pi * i / cfg.phase_count),
                        std::polar(1.0, two_pi * j / cfg.phase_count));
    }
  }

  const double degree = id.degree(e);
  ProbeResult res;
  for (const auto& a : bases) {
    const double norm = a.op_norm();
    if (norm == 0.0) continue;
    const double h = cfg.h * norm;
    for (const auto& x : dirs) {
      for (int k = 0; k < cfg.t_count; ++k) {
        const double t =
            cfg.t_count == 1 ? 0.0 : cfg.t_range * norm * (2.0 * k / (cfg.t_count - 1) - 1.0);
        const double fp = evaluate(id, e, a + x * (t + h));
        const double f0 = evaluate(id, e, a + x * t);
        const double fm = evaluate(id, e, a + x * (t - h));
        const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
        // Rounding in E is relative to |A + tX|^degree, not to |E|, which can
        // cancel to zero.
        const double size = std::pow((a + x * t).op_norm() + h, degree);
        const double scale = std::max({std::abs(fp), std::abs(f0), std::abs(fm), size}) / (norm * norm);
        ++res.triples;
        const double normalized = scale > 0.0 ? d2 / scale : (d2 > 0.0 ? 1e300 : 0.0);
        res.max_normalized = std::max(res.max_normalized, normalized);
        if (d2 > cfg.tol * scale) {
          res.violation_found = true;
          res.witness = ProbeWitness{a, x, t, d2, a + x * t};
          return res;
        }
      }
    }
  }
  return res;
}

std::vector<std::pair<double, ProbeResult>> probe_aubert_threshold(
    const std::vector<double>& m_grid, const ProbeConfig& cfg) {
  require(std::is_sorted(m_grid.begin(), m_grid.end()), "M_grid_sorted",
          "probe_aubert_threshold requires an ascending M grid");
  const Exponent four(4.0);
  std::vector<std::pair<double, ProbeResult>> out;
  for (double m : m_grid) {
    out.emplace_back(m, probe_rank_one_concavity(IntegrandId::aubert(m), four, cfg));
  }
  return out;
}

std::pair<double, double> transition_bracket(
    const std::vector<std::pair<double, ProbeResult>>& scan) {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [m, r] : scan) {
    if (r.violation_found) lo = m;
  }
  for (const auto& [m, r] : scan) {
    if (!r.violation_found && (std::isnan(lo) || m > lo)) {
      hi = m;
      break;
    }
  }
  return {lo, hi};
}

ExperimentReport to_report(const IntegrandId& id, const Exponent& e, const ProbeConfig& cfg,
                           const ProbeResult& r) {
  ExperimentReport rep;
  rep.name = "rank_one_probe";
  rep.parameters = {{"integrand", id.name()}, {"p", e.p()},       {"M", id.M},
                    {"base_count", cfg.base_count}, {"base_x_min", cfg.base_x_min},
                    {"base_x_max", cfg.base_x_max}, {"phase_count", cfg.phase_count},
                    {"t_count", cfg.t_count},       {"t_range", cfg.t_range},
                    {"h", cfg.h},                   {"tol", cfg.tol}};
  rep.metrics["triples"] = static_cast<double>(r.triples);
  rep.metrics["max_normalized_second_difference"] = r.max_normalized;
  rep.details["probe_verdict"] = r.verdict();
  if (r.witness) {
    const auto& w = *r.witness;
    rep.details["witness"] = {{"base", to_json(w.base)},
                              {"direction", to_json(w.direction)},
                              {"t", w.t},
                              {"second_difference", w.second_difference},
                              {"point", to_json(w.point)}};
  }
  // The probe measures; it does not know which outcome is expected.
  rep.verdict = Verdict::NotAsserted;
  return rep;
}

}  // namespace rankone
