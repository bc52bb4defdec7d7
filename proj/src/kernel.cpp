#include "rankone/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace rankone {

namespace {

// x^a for x >= 0 with the continuous extension 0^a = 0 (a > 0).
double pow0(double x, double a) { return x <= 0.0 ? 0.0 : std::pow(x, a); }

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Exponent::Exponent(double p) : p_(p) {
  require(std::isfinite(p) && p > kMin && p <= kMax, "exponent_range",
          "exponent p must satisfy 1 < p <= 64, got " + fmt_double(p));
  p_star_ = std::max(p, p / (p - 1.0));
  if (p == 2.0) p_star_ = 2.0;
  c_p_ = p * std::pow(1.0 - 1.0 / p_star_, p - 1.0);
}

PlanarGradient PlanarGradient::from_matrix(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  return {cplx((a + d) / 2.0, (c - b) / 2.0), cplx((a - d) / 2.0, (c + b) / 2.0)};
}

Eigen::Matrix2d PlanarGradient::to_matrix() const {
  // f_x = xi + zeta, f_y = i (xi - zeta); columns are the partials of (u, v).
  const cplx fx = xi + zeta;
  const cplx fy = cplx(0.0, 1.0) * (xi - zeta);
  Eigen::Matrix2d m;
  m << fx.real(), fy.real(), fx.imag(), fy.imag();
  return m;
}

bool PlanarGradient::is_rank_one() const {
  const double a = abs_xi(), b = abs_zeta();
  const double scale = std::max(a, b);
  return scale > 0.0 && std::abs(a - b) <= 1e-12 * scale;
}

MatrixN::MatrixN(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), "matrix_square", "MatrixN must be square");
  require(entries_.rows() >= 2, "matrix_dimension", "MatrixN requires n >= 2");
}

MatrixN MatrixN::identity(int n) { return MatrixN(Eigen::MatrixXd::Identity(n, n)); }

MatrixN MatrixN::from_planar(const PlanarGradient& g) {
  return MatrixN(Eigen::MatrixXd(g.to_matrix()));
}

double MatrixN::op_norm() const {
  if (n() == 2) {
    Eigen::Matrix2d m = entries_;
    return PlanarGradient::from_matrix(m).op_norm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
  return svd.singularValues()(0);
}

double MatrixN::det() const {
  if (n() == 2) return entries_(0, 0) * entries_(1, 1) - entries_(0, 1) * entries_(1, 0);
  return entries_.partialPivLu().determinant();
}

IntegrandId IntegrandId::burkholder_m(double M) {
  require(M > 0.0, "M_positive", "BurkholderM requires M > 0");
  IntegrandId id;
  id.kind = Kind::BurkholderM;
  id.M = M;
  return id;
}

IntegrandId IntegrandId::beurling_m(double M) {
  require(M > 0.0, "M_positive", "BeurlingM requires M > 0");
  IntegrandId id;
  id.kind = Kind::BeurlingM;
  id.M = M;
  return id;
}

IntegrandId IntegrandId::aubert(double M) {
  require(M > 0.0, "M_positive", "Aubert requires M > 0");
  IntegrandId id;
  id.kind = Kind::Aubert;
  id.M = M;
  return id;
}

IntegrandId IntegrandId::higher_dim(int n, double lambda, int sign) {
  require(n >= 2, "dimension", "HigherDim requires n >= 2");
  require(lambda >= 0.0, "lambda_nonnegative", "HigherDim requires lambda >= 0");
  require(sign == 1 || sign == -1, "sign", "HigherDim sign must be +1 or -1");
  IntegrandId id;
  id.kind = Kind::HigherDim;
  id.n = n;
  id.lambda = lambda;
  id.sign = sign;
  return id;
}

IntegrandId IntegrandId::envelope() {
  IntegrandId id;
  id.kind = Kind::EnvelopeClosedForm;
  return id;
}

IntegrandId IntegrandId::parse(const std::string& name, double M, double lambda, int sign) {
  if (name == "burkholder") return burkholder();
  if (name == "burkholder_m") return burkholder_m(M);
  if (name == "beurling_m") return beurling_m(M);
  if (name == "aubert") return aubert(M);
  if (name == "higher_dim") return higher_dim(2, lambda, sign);
  if (name == "envelope") return envelope();
  throw PreconditionError("integrand_name", "unknown integrand '" + name + "'");
}

std::string IntegrandId::name() const {
  switch (kind) {
    case Kind::Burkholder: return "burkholder";
    case Kind::BurkholderM: return "burkholder_m";
    case Kind::BeurlingM: return "beurling_m";
    case Kind::Aubert: return "aubert";
    case Kind::HigherDim: return "higher_dim";
    case Kind::EnvelopeClosedForm: return "envelope";
  }
  return "unknown";
}

double IntegrandId::degree(const Exponent& e) const { return kind == Kind::Aubert ? 4.0 : e.p(); }

double eval_burkholder(const Exponent& e, const PlanarGradient& g) {
  return eval_burkholder_m(e, e.burkholder_norm(), g);
}

double eval_burkholder_real_form(const Exponent& e, const PlanarGradient& g) {
  const double norm = g.op_norm();
  if (norm == 0.0) return 0.0;
  const double p = e.p();
  return 0.5 * e.p_star() * (g.det() - std::abs(1.0 - 2.0 / p) * norm * norm) *
         std::pow(norm, p - 2.0);
}

double eval_burkholder_m(const Exponent& e, double M, const PlanarGradient& g) {
  return evaluate_moduli(IntegrandId::burkholder_m(M), e, g.abs_xi(), g.abs_zeta());
}

double eval_beurling_m(const Exponent& e, double M, const PlanarGradient& g) {
  return evaluate_moduli(IntegrandId::beurling_m(M), e, g.abs_xi(), g.abs_zeta());
}

double eval_aubert(double M, const PlanarGradient& g) {
  const double x2 = std::norm(g.xi), y2 = std::norm(g.zeta);
  return (x2 - M * M * y2) * (x2 + y2);
}

double eval_higher_dim(int n, double p, double lambda, int sign, const MatrixN& a) {
  require(n >= 2, "dimension", "eval_higher_dim requires n >= 2");
  require(a.n() == n, "dimension", "matrix size does not match n");
  require(p >= 0.5 * n, "p_at_least_half_n", "eval_higher_dim requires p >= n/2");
  require(lambda >= 0.0, "lambda_nonnegative", "eval_higher_dim requires lambda >= 0");
  require(sign == 1 || sign == -1, "sign", "sign must be +1 or -1");
  const double norm = a.op_norm();
  if (norm == 0.0) return 0.0;
  return (sign * a.det() - lambda * std::pow(norm, n)) * std::pow(norm, p - n);
}

double eval_envelope_closed_form(const Exponent& e, const PlanarGradient& g) {
  return evaluate_moduli(IntegrandId::envelope(), e, g.abs_xi(), g.abs_zeta());
}

double distortion(const PlanarGradient& g) {
  const double x = g.abs_xi(), y = g.abs_zeta();
  require(x > y, "orientation_preserving",
          "distortion requires |xi| > |zeta| (positive Jacobian)");
  return (x + y) / (x - y);
}

double evaluate_moduli(const IntegrandId& id, const Exponent& e, double x, double y) {
  const double p = e.p();
  const double s = x + y;
  switch (id.kind) {
    case IntegrandId::Kind::Burkholder:
      return (x - e.burkholder_norm() * y) * pow0(s, p - 1.0);
    case IntegrandId::Kind::BurkholderM:
      return (x - id.M * y) * pow0(s, p - 1.0);
    case IntegrandId::Kind::BeurlingM:
      return pow0(x, p) - std::pow(id.M, p) * pow0(y, p);
    case IntegrandId::Kind::Aubert:
      return (x * x - id.M * id.M * y * y) * (x * x + y * y);
    case IntegrandId::Kind::HigherDim: {
      require(id.n == 2, "dimension", "moduli evaluation of HigherDim needs n = 2");
      if (s == 0.0) return 0.0;
      require(p >= 1.0, "p_at_least_half_n", "HigherDim requires p >= n/2");
      return (id.sign * (x * x - y * y) - id.lambda * s * s) * std::pow(s, p - 2.0);
    }
    case IntegrandId::Kind::EnvelopeClosedForm: {
      const double k = e.burkholder_norm();
      const bool zeta_side = k * y >= x;
      const bool use_beurling = e.at_least_two() ? zeta_side : !zeta_side;
      if (use_beurling) return pow0(x, p) - std::pow(k, p) * pow0(y, p);
      return e.c_p() * (x - k * y) * pow0(s, p - 1.0);
    }
  }
  return 0.0;
}

double evaluate(const IntegrandId& id, const Exponent& e, const PlanarGradient& g) {
  return evaluate_moduli(id, e, g.abs_xi(), g.abs_zeta());
}

VNormResult vnorm(const ModuliFunction& f, int scan_points) {
  require(scan_points >= 3, "scan_points", "vnorm needs at least 3 scan points");
  auto objective = [&](double x) { return std::abs(f(x, 1.0 - x)); };
  const double step = 1.0 / (scan_points - 1);
  int best = 0;
  double best_val = -1.0;
  for (int k = 0; k < scan_points; ++k) {
    const double v = objective(k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  // Golden-section refinement on the neighbouring cells.
  double lo = std::max(0.0, (best - 1) * step);
  double hi = std::min(1.0, (best + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    }
  }
  VNormResult r{best_val, best * step};
  const double mid = 0.5 * (lo + hi);
  const double fm = objective(mid);
  if (fm > r.value) r = {fm, mid};
  return r;
}

VNormResult vnorm(const IntegrandId& id, const Exponent& e, int scan_points) {
  return vnorm([&](double x, double y) { return evaluate_moduli(id, e, x, y); }, scan_points);
}

}  // namespace rankone
