#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rankone/kernel.hpp"
#include "rankone/report.hpp"

namespace rankone {

/// Sampling plan for the rank-one probe.
///
/// Base points are A = (x, 1-x) for `base_count` values of x evenly spaced on
/// [base_x_min, base_x_max]; explicit `base_points` are appended. Directions
/// are X = (e^{i phi}, e^{i psi}) with phi, psi on a `phase_count`-point grid.
/// t runs over `t_count` points of [-t_range, t_range] * |A|.
struct ProbeConfig {
  int base_count = 101;
  double base_x_min = 0.0;
  double base_x_max = 1.0;
  std::vector<PlanarGradient> base_points;
  int phase_count = 32;
  int t_count = 41;
  double t_range = 1.0;
  /// Relative step; the absolute step is h * |A|.
  double h = 1e-3;
  /// A second difference counts as a violation when it exceeds
  /// tol * S / |A|^2, where S is the largest of |E| over the three stencil
  /// values and |A + tX|^degree.
  double tol = 1e-8;

  void validate() const;
};

struct ProbeWitness {
  PlanarGradient base;
  PlanarGradient direction;
  double t = 0.0;
  double second_difference = 0.0;
  /// Midpoint of the stencil, A + t X.
  PlanarGradient point;
};

struct ProbeResult {
  bool violation_found = false;
  std::optional<ProbeWitness> witness;
  /// Largest normalized second difference seen (value / threshold scale).
  double max_normalized = -std::numeric_limits<double>::infinity();
  long triples = 0;

  std::string verdict() const { return violation_found ? "violation-found" : "concave-on-sample"; }
};

/// [E(A+(t+h)X) - 2E(A+tX) + E(A+(t-h)X)] / h^2.
double second_difference(const IntegrandId& id, const Exponent& e, const PlanarGradient& a,
                         const PlanarGradient& x, double t, double h);

/// Scans every (base, direction, t) triple in a fixed order and stops at the
/// first violation, which is therefore the lexicographically first one.
ProbeResult probe_rank_one_concavity(const IntegrandId& id, const Exponent& e,
                                     const ProbeConfig& cfg);

/// Probes the Aubert function for each M (sorted ascending).
std::vector<std::pair<double, ProbeResult>> probe_aubert_threshold(
    const std::vector<double>& m_grid, const ProbeConfig& cfg);

/// Largest violating M and smallest concave M of a threshold scan; NaN when
/// missing.
std::pair<double, double> transition_bracket(
    const std::vector<std::pair<double, ProbeResult>>& scan);

ExperimentReport to_report(const IntegrandId& id, const Exponent& e, const ProbeConfig& cfg,
                           const ProbeResult& r);

}  // namespace rankone
