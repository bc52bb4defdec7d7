#include "rankone/beurling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "quadrature.hpp"
#include "rankone/errors.hpp"

namespace rankone {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW's planner is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer alloc_buffer(std::size_t count) {
  FftwBuffer b(fftw_alloc_complex(count));
  if (!b) throw std::bad_alloc();
  return b;
}

class PlanPair {
 public:
  explicit PlanPair(int n) {
    FftwBuffer scratch = alloc_buffer(static_cast<std::size_t>(n) * n);
    forward_ = fftw_plan_dft_2d(n, n, scratch.get(), scratch.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(n, n, scratch.get(), scratch.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed for n = " + std::to_string(n));
  }
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;

  fftw_plan forward() const { return forward_; }
  fftw_plan backward() const { return backward_; }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

std::shared_ptr<const PlanPair> plans_for(int n) {
  static std::map<int, std::shared_ptr<const PlanPair>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_shared<PlanPair>(n)).first;
  return it->second;
}

// In-place transform of `data` (length n^2) without normalization.
void transform(std::vector<cplx>& data, int n, bool forward) {
  const auto plans = plans_for(n);
  FftwBuffer buf = alloc_buffer(data.size());
  std::memcpy(buf.get(), data.data(), data.size() * sizeof(cplx));
  fftw_execute_dft(forward ? plans->forward() : plans->backward(), buf.get(), buf.get());
  std::memcpy(static_cast<void*>(data.data()), buf.get(), data.size() * sizeof(cplx));
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Multiplies each Fourier coefficient by symbol(kx, ky) with integer frequencies.
template <class Symbol>
GridField apply_multiplier(const GridField& f, Symbol symbol) {
  f.validate();
  const int n = f.n;
  std::vector<cplx> c = f.values;
  transform(c, n, true);
  const double inv = 1.0 / (static_cast<double>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      c[static_cast<std::size_t>(iy) * n + ix] *=
          symbol(fft_frequency(ix, n), fft_frequency(iy, n)) * inv;
  transform(c, n, false);
  GridField out(n, f.L);
  out.values = std::move(c);
  return out;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double smooth_step_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / ((a + b) * (a + b));
}

}  // namespace

GridField::GridField(int n_, double L_) : n(n_), L(L_) {
  require(is_power_of_two(n) && n >= 64, "n_power_of_two", "grid size must be a power of two >= 64");
  require(L > 0.0 && std::isfinite(L), "L_positive", "grid period L must be positive");
  values.assign(static_cast<std::size_t>(n) * n, cplx{});
}

GridField GridField::sample(int n, double L, const std::function<cplx(cplx)>& f) {
  GridField g(n, L);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) g.at(ix, iy) = f(g.point(ix, iy));
  return g;
}

void GridField::validate() const {
  require(is_power_of_two(n) && n >= 64, "n_power_of_two", "grid size must be a power of two >= 64");
  require(L > 0.0 && std::isfinite(L), "L_positive", "grid period L must be positive");
  require(values.size() == static_cast<std::size_t>(n) * n, "values_size", "grid holds n^2 samples");
  for (const cplx& v : values)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), "finite_values",
            "grid samples must be finite");
}

int fft_frequency(int j, int n) { return j < n / 2 ? j : j - n; }

std::vector<cplx> fourier_coefficients(const GridField& f) {
  f.validate();
  std::vector<cplx> c = f.values;
  transform(c, f.n, true);
  return c;
}

GridField from_fourier(int n, double L, const std::vector<cplx>& coeffs) {
  GridField g(n, L);
  require(coeffs.size() == g.values.size(), "values_size", "coefficient array must hold n^2 entries");
  g.values = coeffs;
  transform(g.values, n, false);
  const double inv = 1.0 / (static_cast<double>(n) * n);
  for (cplx& v : g.values) v *= inv;
  return g;
}

GridField beurling_apply(const GridField& w) {
  return apply_multiplier(w, [](int kx, int ky) {
    if (kx == 0 && ky == 0) return cplx{};
    const cplx k(kx, ky);
    return std::conj(k) / k;
  });
}

GridField spectral_dbar(const GridField& f) {
  const int half = f.n / 2;
  const double s = kTwoPi / f.L;
  return apply_multiplier(f, [=](int kx, int ky) {
    if (kx == -half || ky == -half) return cplx{};
    return cplx(0.0, 0.5) * cplx(s * kx, s * ky);
  });
}

GridField spectral_d(const GridField& f) {
  const int half = f.n / 2;
  const double s = kTwoPi / f.L;
  return apply_multiplier(f, [=](int kx, int ky) {
    if (kx == -half || ky == -half) return cplx{};
    return cplx(0.0, 0.5) * cplx(s * kx, -s * ky);
  });
}

double lp_norm(const GridField& w, double p) {
  require(p >= 1.0, "p_at_least_1", "lp_norm requires p >= 1");
  std::vector<double> a(w.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(w.values[i]), p);
  return std::pow(detail::pairwise_sum(a) * w.h() * w.h(), 1.0 / p);
}

double l2_distance(const GridField& a, const GridField& b) {
  require(a.n == b.n && a.L == b.L, "same_grid", "fields must live on the same grid");
  std::vector<double> d(a.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(a.values[i] - b.values[i]);
  return std::sqrt(detail::pairwise_sum(d) * a.h() * a.h());
}

json NormEstimate::to_json() const {
  json j{{"p", p}, {"ratio", ratio}, {"n", n}, {"L", L}};
  j["family_parameter"] = std::isnan(family_parameter) ? json(nullptr) : json(family_parameter);
  return j;
}

NormEstimate lp_ratio(const GridField& w, double p, double family_parameter) {
  require(p > 1.0, "p_gt_1", "lp_ratio requires p > 1");
  const double den = lp_norm(w, p);
  require(den > 0.0, "nonzero_denominator", "lp_ratio of a zero field is undefined");
  NormEstimate est;
  est.p = p;
  est.ratio = lp_norm(beurling_apply(w), p) / den;
  est.family_parameter = family_parameter;
  est.n = w.n;
  est.L = w.L;
  return est;
}

// ---------------------------------------------------------------------------

std::pair<double, double> alpha_window(double p) { return {1.0 - 2.0 / p, 1.0}; }

PowerFamily PowerFamily::for_exponent(double p, double alpha, double R) {
  require(p > 1.0, "p_gt_1", "power family requires p > 1");
  const auto [lo, hi] = alpha_window(p);
  require(alpha > lo && alpha < hi, "alpha_window",
          "alpha must lie in the integrability window (1 - 2/p, 1)");
  require(R > 0.0, "R_positive", "R must be positive");
  PowerFamily f;
  f.alpha = alpha;
  f.R = R;
  f.delta = 0.1 * R;
  f.orientation = p >= 2.0 ? Orientation::Plus : Orientation::Minus;
  return f;
}

std::pair<cplx, cplx> PowerFamily::derivatives(cplx z) const {
  const double r = std::abs(z);
  if (r == 0.0) return {cplx{}, cplx{}};
  const double t = (r - (R - delta)) / (2.0 * delta);
  const double chi = smooth_step(t), dchi = smooth_step_prime(t) / (2.0 * delta);
  const double inner = std::pow(r, alpha), outer = std::pow(R, alpha + 1.0) / r;
  const double rho = (1.0 - chi) * inner + chi * outer;
  const double drho = (1.0 - chi) * alpha * inner / r - chi * outer / r + dchi * (outer - inner);
  const double a = 0.5 * (rho / r + drho), b = 0.5 * (drho - rho / r);
  const cplx phase = (z / r) * (z / r);
  if (orientation == Orientation::Plus) return {cplx(a, 0.0), b * phase};
  return {b * std::conj(phase), cplx(a, 0.0)};
}

GridField PowerFamily::sample_dbar(int n, double L) const {
  return GridField::sample(n, L, [this](cplx z) { return derivatives(z).second; });
}

GridField PowerFamily::sample_d(int n, double L) const {
  return GridField::sample(n, L, [this](cplx z) { return derivatives(z).first; });
}

double PowerFamily::continuum_ratio(double p) const {
  const double k = (alpha - 1.0) * p + 2.0;
  const double inner = kTwoPi * std::pow(R, k) / k;
  const double big = std::pow(0.5 * (1.0 + alpha), p) * inner;
  const double small = std::pow(0.5 * (1.0 - alpha), p) * inner;
  const double tail = kTwoPi * std::pow(R, (alpha + 1.0) * p + 2.0 - 2.0 * p) / (2.0 * p - 2.0);
  return orientation == Orientation::Plus ? std::pow(big / (small + tail), 1.0 / p)
                                          : std::pow((small + tail) / big, 1.0 / p);
}

std::vector<double> default_alpha_grid(double p) {
  const auto [lo, hi] = alpha_window(p);
  std::vector<double> g;
  for (double f : {0.001, 0.003, 0.01, 0.03, 0.1, 0.2, 0.3, 0.5}) g.push_back(lo + (hi - lo) * f);
  return g;
}

std::vector<NormEstimate> norm_lower_bound_scan(double p, const std::vector<double>& alpha_grid, int n,
                                                double L, double R) {
  require(!alpha_grid.empty(), "alpha_grid", "alpha grid must not be empty");
  std::vector<PowerFamily> fams;
  for (double a : alpha_grid) fams.push_back(PowerFamily::for_exponent(p, a, R));
  require(L >= 8.0 * 2.0 * (R + 0.1 * R), "L_padding", "L must be at least 8x the support diameter");
  std::vector<NormEstimate> out;
  for (const auto& f : fams) out.push_back(lp_ratio(f.sample_dbar(n, L), p, f.alpha));
  return out;
}

ExperimentReport beurling_scan_report(double p, const std::vector<double>& alpha_grid, int n, double L,
                                      const std::optional<std::filesystem::path>& csv) {
  require(n >= 128, "n_refinement", "the refinement study needs n >= 128");
  const Exponent e(p);
  const double bound = e.burkholder_norm();
  const double allowance = 0.05;
  ExperimentReport rep;
  rep.name = "beurling_norm_scan";
  rep.parameters = {{"p", p},         {"alpha_grid", alpha_grid}, {"n", n}, {"n_coarse", n / 2},
                    {"L", L},         {"R", 1.0},                 {"blend_halfwidth", 0.1},
                    {"allowance", allowance}};

  const auto fine = norm_lower_bound_scan(p, alpha_grid, n, L);
  const auto coarse = norm_lower_bound_scan(p, alpha_grid, n / 2, L);
  json rows = json::array();
  std::size_t best = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const PowerFamily fam = PowerFamily::for_exponent(p, alpha_grid[i]);
    rows.push_back({{"alpha", alpha_grid[i]},
                    {"ratio", fine[i].ratio},
                    {"ratio_coarse", coarse[i].ratio},
                    {"refinement_change", fine[i].ratio - coarse[i].ratio},
                    {"continuum_ratio", fam.continuum_ratio(p)},
                    {"pointwise_ratio", fam.orientation == Orientation::Plus
                                            ? (1.0 + fam.alpha) / (1.0 - fam.alpha)
                                            : (1.0 - fam.alpha) / (1.0 + fam.alpha)}});
    if (fine[i].ratio > fine[best].ratio) best = i;
    worst_excess = std::max({worst_excess, fine[i].ratio / bound - 1.0, coarse[i].ratio / bound - 1.0});
  }
  rep.details["scan"] = rows;
  rep.metrics["best_ratio"] = fine[best].ratio;
  rep.metrics["best_alpha"] = alpha_grid[best];
  rep.metrics["best_ratio_coarse"] = coarse[best].ratio;
  rep.metrics["best_refinement_change"] = fine[best].ratio - coarse[best].ratio;
  rep.metrics["conjectured_norm"] = bound;
  rep.metrics["max_relative_excess"] = worst_excess;

  if (csv) {
    if (csv->has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(csv->parent_path(), ec);
    }
    std::ofstream os(*csv);
    if (!os) throw std::runtime_error("cannot open CSV file '" + csv->string() + "' for writing");
    os << "alpha,ratio,n,L\n";
    char buf[160];
    for (const auto* scan : {&coarse, &fine})
      for (const auto& est : *scan) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", est.family_parameter, est.ratio, est.n,
                      est.L);
        os << buf;
      }
    if (!os) throw std::runtime_error("failed writing CSV file '" + csv->string() + "'");
    rep.artifacts.push_back(csv->string());
  }
  rep.verdict = worst_excess <= allowance ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ExperimentReport beurling_identity_report(int n, double L, std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "beurling_identities";
  rep.parameters = {{"n", n}, {"L", L}, {"seed", seed}, {"band", n / 8}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);

  // Plancherel on a zero-mean random field.
  GridField w(n, L);
  cplx mean{};
  for (cplx& v : w.values) mean += (v = cplx(g(rng), g(rng)));
  mean /= static_cast<double>(w.values.size());
  for (cplx& v : w.values) v -= mean;
  const GridField sw = beurling_apply(w);
  const double plancherel = std::abs(lp_norm(sw, 2.0) / lp_norm(w, 2.0) - 1.0);

  // Twice applied: each coefficient picks up (conj k / k)^2.
  const auto c0 = fourier_coefficients(w);
  const auto c2 = fourier_coefficients(beurling_apply(sw));
  double square_err = 0.0, scale = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
      const cplx k(fft_frequency(ix, n), fft_frequency(iy, n));
      const cplx m = (ix == 0 && iy == 0) ? cplx{} : std::conj(k) / k;
      square_err = std::max(square_err, std::abs(c2[i] - m * m * c0[i]));
      scale = std::max(scale, std::abs(c0[i]));
    }

  // S dbar f = d f for a band-limited f.
  const int band = n / 8;
  std::vector<cplx> coeffs(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (std::abs(fft_frequency(ix, n)) <= band && std::abs(fft_frequency(iy, n)) <= band)
        coeffs[static_cast<std::size_t>(iy) * n + ix] = cplx(g(rng), g(rng));
  const GridField f = from_fourier(n, L, coeffs);
  const GridField df = spectral_d(f);
  const double identity = l2_distance(beurling_apply(spectral_dbar(f)), df) / lp_norm(df, 2.0);

  // One Fourier mode: S multiplies it by a unimodular constant.
  const int mx = 3, my = -5;
  const GridField mode = GridField::sample(n, L, [&](cplx z) {
    return std::exp(cplx(0.0, kTwoPi / L * (mx * z.real() + my * z.imag())));
  });
  const cplx k(mx, my);
  const GridField smode = beurling_apply(mode);
  double mode_err = 0.0;
  for (std::size_t i = 0; i < mode.values.size(); ++i)
    mode_err = std::max(mode_err, std::abs(smode.values[i] - std::conj(k) / k * mode.values[i]));
  const double mode_ratio = lp_ratio(mode, 4.0).ratio;

  GridField constant(n, L);
  for (cplx& v : constant.values) v = cplx(1.5, -0.5);
  double zero_mode = 0.0;
  for (const cplx& v : beurling_apply(constant).values) zero_mode = std::max(zero_mode, std::abs(v));

  rep.metrics["plancherel_rel_error"] = plancherel;
  rep.metrics["square_multiplier_max_error"] = square_err / scale;
  rep.metrics["identity_rel_error"] = identity;
  rep.metrics["single_mode_max_error"] = mode_err;
  rep.metrics["single_mode_ratio_p4"] = mode_ratio;
  rep.metrics["zero_mode_output_max"] = zero_mode;
  const bool ok = plancherel <= 1e-10 && square_err / scale <= 1e-12 && identity <= 1e-12 &&
                  mode_err <= 1e-12 && std::abs(mode_ratio - 1.0) <= 1e-12 && zero_mode <= 1e-12;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ExperimentReport blended_map_refinement(double p, double alpha, const std::vector<int>& sizes, double L) {
  require(sizes.size() >= 2, "sizes", "refinement needs at least two grid sizes");
  const PowerFamily fam = PowerFamily::for_exponent(p, alpha);
  ExperimentReport rep;
  rep.name = "blended_map_refinement";
  rep.parameters = {{"p", p}, {"alpha", alpha}, {"sizes", sizes}, {"L", L}, {"R", fam.R},
                    {"orientation", to_string(fam.orientation)}};
  json errs = json::array();
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : sizes) {
    const GridField d = fam.sample_d(n, L);
    const double err = l2_distance(beurling_apply(fam.sample_dbar(n, L)), d) / lp_norm(d, 2.0);
    decreasing = decreasing && err < prev;
    prev = err;
    errs.push_back({{"n", n}, {"rel_l2_error", err}});
  }
  rep.details["errors"] = errs;
  rep.metrics["finest_rel_l2_error"] = prev;
  rep.verdict = decreasing ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace rankone
