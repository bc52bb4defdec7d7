#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankone/kernel.hpp"
#include "rankone/report.hpp"

namespace rankone {

/// A pointwise inequality  lhs(g) <= rhs(g)  between two integrands, with a
/// positive constant multiplying one of the sides.
struct InequalityCase {
  enum class Side { Lhs, Rhs };

  std::string name;
  IntegrandId lhs;
  IntegrandId rhs;
  double constant = 1.0;
  Side constant_on = Side::Rhs;
  std::string sample_domain = "|xi| + |zeta| = 1";
  /// Exponent used to evaluate both sides.
  double p = 2.0;
  /// Points of the normalized segment x = |xi| that the deterministic sweep
  /// always includes (e.g. the shared zero set of the two sides).
  std::vector<double> special_x;
};

struct Violation {
  PlanarGradient point;
  double lhs_value = 0.0;
  double rhs_value = 0.0;
  double gap = 0.0;
};

struct VerifyOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  /// Absolute tolerance on the gap after normalization |xi| + |zeta| = 1.
  double tol = 1e-12;
  /// Size of the deterministic sweep over x in [0, 1].
  int sweep_points = 100001;
  /// Number of random (g, t) pairs used for the scale-invariance check.
  int scale_pairs = 100;
};

/// Evaluates both sides (constant applied) at a point.
Violation evaluate_case(const InequalityCase& c, const PlanarGradient& g);

/// Generic sweep: deterministic grid on the normalized segment, the case's
/// special points, and `samples` random moduli pairs with random phases.
/// Reports max_gap, argmax_point, the first violation (if any), the isotropy
/// and scale-invariance self-checks, and equality points found by the sweep.
ExperimentReport verify_case(const InequalityCase& c, const VerifyOptions& opt);

InequalityCase bebu_case(const Exponent& e);
/// The same pair with the constant on the left-hand side, as the inequality
/// is commonly printed: C_p (|xi|^p - (p*-1)^p |zeta|^p) <= B_p.
InequalityCase bebu_case_constant_left(const Exponent& e);
InequalityCase m_pointwise_case(const Exponent& e, double M);
InequalityCase aubert_pair_case(double M);

/// F_p <= C_p B_p with C_p = p (1 - 1/p*)^(p-1). The constant-left form is
/// run as well; its outcome is recorded under "constant_left_form".
ExperimentReport verify_bebu(const Exponent& e, int samples, std::uint64_t seed);
/// |xi|^p - M^p |zeta|^p <= p (M/(1+M))^(p-1) B_p^M; requires M >= p* - 1.
ExperimentReport verify_m_pointwise(const Exponent& e, double M, int samples, std::uint64_t seed);
/// |xi|^4 - M^4 |zeta|^4 <= c A(xi, zeta) with c = 2M^2/(1+M^2); requires M >= 1.
ExperimentReport verify_aubert_pair(double M, int samples, std::uint64_t seed);
/// Envelope >= F_p on a grid over [0,2]^2, equality on the F_p branch, and
/// agreement of the branch formulas on the interface ray.
ExperimentReport verify_envelope_majorant(const Exponent& e, int grid_n);

/// Complex and real-matrix forms of B_p on `samples` random gradients; the
/// difference is measured against (|xi| + |zeta|)^p and must stay <= 1e-12.
ExperimentReport verify_cross_form(const Exponent& e, int samples, std::uint64_t seed);
/// vnorm of B_p compared with p* - 1 (tolerance 1e-6).
ExperimentReport vnorm_report(const Exponent& e);

}  // namespace rankone
