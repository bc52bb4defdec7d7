#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rankone/beurling.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridField mode(int n, double L, int k1, int k2) {
  return GridField::sample(n, L, [&](cplx z) { return std::polar(1.0, kTwoPi * (k1 * z.real() + k2 * z.imag()) / L); });
}

}  // namespace

TEST_CASE("grid validation and frequencies") {
  CHECK_THROWS_AS(GridField(32, 1.0).validate(), PreconditionError);
  CHECK_THROWS_AS(GridField(96, 1.0).validate(), PreconditionError);
  CHECK_NOTHROW(GridField(64, 1.0).validate());
  CHECK(fft_frequency(0, 8) == 0);
  CHECK(fft_frequency(3, 8) == 3);
  CHECK(fft_frequency(4, 8) == -4);
  CHECK(fft_frequency(7, 8) == -1);
}

TEST_CASE("fourier round trip") {
  const GridField f = GridField::sample(64, 5.0, [](cplx z) { return std::exp(-std::norm(z)) * z; });
  const GridField back = from_fourier(64, 5.0, fourier_coefficients(f));
  CHECK(l2_distance(f, back) < 1e-13);
}

TEST_CASE("multiplier acts on single modes") {
  const int n = 64;
  const double L = 10.0;
  const GridField zero = GridField::sample(n, L, [](cplx) { return cplx(2.5, -1.0); });
  for (const auto& v : beurling_apply(zero).values) CHECK(std::abs(v) < 1e-13);
  for (auto [k1, k2] : {std::pair{1, 0}, std::pair{0, 3}, std::pair{-2, 5}}) {
    const GridField w = mode(n, L, k1, k2);
    const GridField s = beurling_apply(w);
    const cplx kappa(k1, k2);
    const cplx m = std::conj(kappa) / kappa;
    double err = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) err = std::max(err, std::abs(s.values[i] - m * w.values[i]));
    CHECK(err < 1e-12);
    CHECK(lp_ratio(w, 4.0).ratio == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("plancherel and the squared multiplier") {
  const auto rep = beurling_identity_report(128, 40.0, 3);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.metrics.at("plancherel_rel_error") <= 1e-10);
  CHECK(rep.metrics.at("identity_rel_error") <= 1e-12);
  CHECK(rep.metrics.at("square_multiplier_max_error") <= 1e-12);
  CHECK(rep.metrics.at("zero_mode_output_max") <= 1e-12);
}

TEST_CASE("spectral derivatives of a band-limited field") {
  const int n = 64;
  const double L = kTwoPi;
  // f = e^{i(2x + 3y)}: f_zbar = (i/2)(2 + 3i) f, f_z = (i/2)(2 - 3i) f.
  const GridField f = mode(n, L, 2, 3);
  const GridField db = spectral_dbar(f), d = spectral_d(f);
  double err = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    err = std::max(err, std::abs(db.values[i] - cplx(0, 0.5) * cplx(2, 3) * f.values[i]));
    err = std::max(err, std::abs(d.values[i] - cplx(0, 0.5) * cplx(2, -3) * f.values[i]));
  }
  CHECK(err < 1e-12);
  CHECK(l2_distance(beurling_apply(db), d) < 1e-12 * std::sqrt(L * L));
}

TEST_CASE("lp ratio basics") {
  const GridField w = GridField::sample(64, 8.0, [](cplx z) { return z * std::exp(-std::norm(z)); });
  CHECK(lp_ratio(w, 2.0).ratio == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(lp_ratio(GridField(64, 8.0), 3.0), PreconditionError);
  CHECK_THROWS_AS(lp_ratio(w, 1.0), PreconditionError);
  const NormEstimate est = lp_ratio(w, 3.0, 0.25);
  CHECK(est.to_json().at("family_parameter") == 0.25);
  CHECK(est.n == 64);
}

TEST_CASE("power family") {
  CHECK(alpha_window(4.0).first == Approx(0.5));
  CHECK(alpha_window(4.0).second == 1.0);
  CHECK_THROWS_AS(PowerFamily::for_exponent(4.0, 0.4), PreconditionError);
  CHECK_THROWS_AS(PowerFamily::for_exponent(4.0, 1.0), PreconditionError);
  const auto fam = PowerFamily::for_exponent(4.0, 0.6);
  CHECK(fam.orientation == Orientation::Plus);
  CHECK(PowerFamily::for_exponent(1.5, -0.2).orientation == Orientation::Minus);
  // Pointwise ratio inside the blend radius.
  const auto [fz, fzb] = fam.derivatives(cplx(0.3, 0.2));
  CHECK(std::abs(fz) / std::abs(fzb) == Approx(1.6 / 0.4));
  // Outside the blend only one derivative survives.
  const auto [gz, gzb] = fam.derivatives(cplx(2.0, 0.5));
  CHECK(std::abs(gz) < 1e-15);
  CHECK(std::abs(gzb) > 0.0);
  // The truncation tail pulls the whole-plane ratio below the pointwise one.
  CHECK(fam.continuum_ratio(4.0) < 4.0);
  CHECK(fam.continuum_ratio(4.0) > 1.0);
}

TEST_CASE("blended map: S of dbar f approaches d f") {
  const auto rep = blended_map_refinement(4.0, 0.6, {128, 256, 512}, 20.0);
  CHECK(rep.verdict == Verdict::Pass);
}

TEST_CASE("norm scan stays under the conjectured norm and is reproducible") {
  const std::vector<double> alphas{0.55, 0.6, 0.8};
  const auto a = norm_lower_bound_scan(4.0, alphas, 256, 40.0);
  const auto b = norm_lower_bound_scan(4.0, alphas, 256, 40.0);
  REQUIRE(a.size() == 3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].ratio == b[k].ratio);
    CHECK(a[k].ratio > 1.0);
    CHECK(a[k].ratio <= 3.0 * 1.05);
  }
  // Smaller alpha gives a larger ratio.
  CHECK(a[0].ratio > a[1].ratio);
  CHECK(a[1].ratio > a[2].ratio);
  CHECK_THROWS_AS(norm_lower_bound_scan(4.0, {0.45}, 256, 40.0), PreconditionError);
  CHECK_THROWS_AS(norm_lower_bound_scan(4.0, {0.6}, 256, 10.0), PreconditionError);
  const auto mirrored = norm_lower_bound_scan(1.5, {-0.3}, 256, 40.0);
  CHECK(mirrored[0].ratio > 1.0);
  CHECK(mirrored[0].ratio <= 2.0 * 1.05);
}
