#pragma once

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "rankone/errors.hpp"

namespace rankone {

using cplx = std::complex<double>;

/// Integrability exponent p together with the constants derived from it.
///
/// p* = max(p, p/(p-1)); p* - 1 is the conjectured norm of the Beurling
/// transform on L^p and the constant in the Burkholder function; c_p is the
/// factor p (1 - 1/p*)^(p-1) that turns the Burkholder function into the
/// rank-one concave envelope of |xi|^p - (p*-1)^p |zeta|^p.
class Exponent {
 public:
  static constexpr double kMin = 1.0;
  static constexpr double kMax = 64.0;

  /// Throws PreconditionError unless 1 < p <= 64.
  explicit Exponent(double p);

  double p() const { return p_; }
  double p_star() const { return p_star_; }
  /// p* - 1.
  double burkholder_norm() const { return p_star_ - 1.0; }
  /// c_p = p (1 - 1/p*)^(p-1).
  double c_p() const { return c_p_; }
  bool at_least_two() const { return p_ >= 2.0; }

 private:
  double p_;
  double p_star_;
  double c_p_;
};

/// A planar gradient (f_z, f_zbar). As a 2x2 real matrix its operator norm is
/// |xi| + |zeta| and its determinant |xi|^2 - |zeta|^2.
struct PlanarGradient {
  cplx xi{0.0, 0.0};
  cplx zeta{0.0, 0.0};

  PlanarGradient() = default;
  PlanarGradient(cplx xi_, cplx zeta_) : xi(xi_), zeta(zeta_) {}

  static PlanarGradient from_moduli(double x, double y) { return {cplx(x, 0.0), cplx(y, 0.0)}; }
  /// [[a, b], [c, d]] -> (((a+d) + i(c-b))/2, ((a-d) + i(c+b))/2).
  static PlanarGradient from_matrix(const Eigen::Matrix2d& m);
  Eigen::Matrix2d to_matrix() const;

  double abs_xi() const { return std::abs(xi); }
  double abs_zeta() const { return std::abs(zeta); }
  double op_norm() const { return abs_xi() + abs_zeta(); }
  double det() const { return std::norm(xi) - std::norm(zeta); }
  bool is_rank_one() const;

  PlanarGradient operator+(const PlanarGradient& o) const { return {xi + o.xi, zeta + o.zeta}; }
  PlanarGradient operator*(double t) const { return {xi * t, zeta * t}; }
};

/// Square real matrix of size n >= 2.
class MatrixN {
 public:
  explicit MatrixN(Eigen::MatrixXd entries);
  static MatrixN identity(int n);
  static MatrixN from_planar(const PlanarGradient& g);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// Largest singular value: closed form for n = 2, Jacobi SVD otherwise.
  double op_norm() const;
  double det() const;

 private:
  Eigen::MatrixXd entries_;
};

/// Tag naming one of the closed-form integrands.
struct IntegrandId {
  enum class Kind { Burkholder, BurkholderM, BeurlingM, Aubert, HigherDim, EnvelopeClosedForm };

  Kind kind = Kind::Burkholder;
  double M = 0.0;
  int n = 2;
  double lambda = 0.0;
  int sign = +1;

  static IntegrandId burkholder() { return {}; }
  static IntegrandId burkholder_m(double M);
  static IntegrandId beurling_m(double M);
  static IntegrandId aubert(double M);
  static IntegrandId higher_dim(int n, double lambda, int sign);
  static IntegrandId envelope();

  /// Parses "burkholder", "burkholder_m", "beurling_m", "aubert",
  /// "higher_dim", "envelope"; parameters are supplied separately.
  static IntegrandId parse(const std::string& name, double M, double lambda, int sign);

  std::string name() const;
  /// Homogeneity degree: 4 for Aubert, p otherwise.
  double degree(const Exponent& e) const;
};

double eval_burkholder(const Exponent& e, const PlanarGradient& g);
double eval_burkholder_real_form(const Exponent& e, const PlanarGradient& g);
double eval_burkholder_m(const Exponent& e, double M, const PlanarGradient& g);
double eval_beurling_m(const Exponent& e, double M, const PlanarGradient& g);
double eval_aubert(double M, const PlanarGradient& g);
/// [sign det A - lambda |A|^n] |A|^(p-n); requires n >= 2, p >= n/2, lambda >= 0.
double eval_higher_dim(int n, double p, double lambda, int sign, const MatrixN& a);
/// Rank-one concave envelope of F_p = |xi|^p - (p*-1)^p |zeta|^p.
double eval_envelope_closed_form(const Exponent& e, const PlanarGradient& g);
/// K = (|xi|+|zeta|)/(|xi|-|zeta|); requires |xi| > |zeta|.
double distortion(const PlanarGradient& g);

/// Evaluates an integrand on moduli (x, y) = (|xi|, |zeta|).
double evaluate_moduli(const IntegrandId& id, const Exponent& e, double x, double y);
/// Evaluates an integrand; isotropic, so only the moduli matter.
double evaluate(const IntegrandId& id, const Exponent& e, const PlanarGradient& g);

/// Isotropic integrand given by its moduli function.
using ModuliFunction = std::function<double(double, double)>;

struct VNormResult {
  double value = 0.0;
  double argmax_x = 0.0;  // maximizer on {(x, 1-x)}
};

/// sup over |xi|+|zeta| = 1 of |E|: dense scan of x in [0, 1] followed by
/// golden-section refinement around the best sample.
VNormResult vnorm(const ModuliFunction& f, int scan_points = 4097);
VNormResult vnorm(const IntegrandId& id, const Exponent& e, int scan_points = 4097);

}  // namespace rankone
