#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "rankone/envelope.hpp"

using namespace rankone;

namespace {

double max_abs_diff(const ModuliGrid& a, const ModuliGrid& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
  return d;
}

IntegrandId beurling_function(const Exponent& e) { return IntegrandId::beurling_m(e.burkholder_norm()); }

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(ModuliGrid(32, 40, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(ModuliGrid(33, 33, 0.0, 1.0), PreconditionError);
  ModuliGrid g(33, 65, 1.0, 2.0);
  CHECK_NOTHROW(g.validate());
  ModuliGrid uneven(33, 33, 1.0, 2.0);
  CHECK_THROWS_AS(uneven.validate(), PreconditionError);
  g.values[5] = std::nan("");
  CHECK_THROWS_AS(g.validate(), PreconditionError);
}

TEST_CASE("diagonally affine data is a fixed point") {
  const Exponent two(2.0);
  const ModuliGrid f2 = sample_grid(beurling_function(two), two, 65, 65, 2.0, 2.0);
  CHECK(max_abs_diff(zigzag_concavify_step(f2), f2) <= 1e-13);
}

TEST_CASE("rank-one concave data is a fixed point") {
  for (double p : {1.5, 3.0}) {
    const Exponent e(p);
    const ModuliGrid b = sample_grid(IntegrandId::burkholder(), e, 65, 65, 2.0, 2.0);
    CHECK(max_abs_diff(zigzag_concavify_step(b), b) <= 1e-12);
    const ModuliGrid env = sample_grid(IntegrandId::envelope(), e, 65, 65, 2.0, 2.0);
    CHECK(max_abs_diff(zigzag_concavify_step(env), env) <= 1e-12);
  }
}

TEST_CASE("sweeps only raise values and keep the window edges") {
  const Exponent three(3.0);
  const ModuliGrid f = sample_grid(beurling_function(three), three, 65, 65, 2.0, 2.0);
  ModuliGrid g = f;
  for (int it = 0; it < 20; ++it) {
    const ModuliGrid before = g;
    zigzag_concavify_in_place(g);
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      CHECK(g.values[k] >= before.values[k]);
      CHECK(g.values[k] >= f.values[k]);
    }
  }
  for (int k = 0; k < 65; ++k) {
    CHECK(g.at(64, k) == f.at(64, k));
    CHECK(g.at(k, 64) == f.at(k, 64));
  }
}

TEST_CASE("converged envelope of F_3") {
  const Exponent three(3.0);
  const auto [g, run] = compute_envelope(beurling_function(three), three, 65, 65, 2.0, 2.0, 1e-10, 100000);
  CHECK(run.converged);
  CHECK(run.sup_change_history.back() < 1e-10);
  // Idempotent at the fixed point.
  CHECK(max_abs_diff(zigzag_concavify_step(g), g) < 1e-10);
  // The closed form raises F wherever x > 2y. On the window the fixed point
  // only lifts part of that wedge: everything with x > 5y, and roughly half
  // of the strip 2y < x <= 5y next to the branch line.
  const ModuliGrid f = sample_grid(beurling_function(three), three, 65, 65, 2.0, 2.0);
  int wedge = 0, lifted = 0;
  for (int i = 1; i < 64; ++i)
    for (int j = 1; j < 64; ++j) {
      if (g.x(i) <= 2.0 * g.y(j) + 1e-9) continue;
      ++wedge;
      lifted += g.at(i, j) > f.at(i, j);
      if (g.x(i) > 5.0 * g.y(j)) CHECK(g.at(i, j) > f.at(i, j));
    }
  CHECK(2 * lifted > wedge);
  // A window envelope is the envelope of a restricted problem, so it never
  // exceeds the whole-plane closed form.
  const ModuliGrid cf = sample_grid(IntegrandId::envelope(), three, 65, 65, 2.0, 2.0);
  for (std::size_t k = 0; k < g.values.size(); ++k) CHECK(g.values[k] <= cf.values[k] + 1e-12);
}

TEST_CASE("F_1.5 converges and stays between F and the closed form") {
  const Exponent e(1.5);
  const auto [g, run] = compute_envelope(beurling_function(e), e, 65, 65, 2.0, 2.0, 1e-8, 100000);
  CHECK(run.converged);
  const ModuliGrid f = sample_grid(beurling_function(e), e, 65, 65, 2.0, 2.0);
  const ModuliGrid cf = sample_grid(IntegrandId::envelope(), e, 65, 65, 2.0, 2.0);
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    CHECK(g.values[k] >= f.values[k]);
    CHECK(g.values[k] <= cf.values[k] + 1e-12);
  }
  // Branches are swapped: the raised region is where F_p is steep in |zeta|.
  CHECK(g.at(0, 32) > f.at(0, 32));
}

TEST_CASE("non-convergence is flagged") {
  const Exponent three(3.0);
  const auto [g, run] = compute_envelope(beurling_function(three), three, 65, 65, 2.0, 2.0, 1e-14, 2);
  CHECK_FALSE(run.converged);
  CHECK(run.iterations == 2);
  CHECK_THROWS_AS(compute_envelope(beurling_function(three), three, 65, 65, 2.0, 2.0, 0.0, 10),
                  PreconditionError);
}

TEST_CASE("grid CSV layout") {
  const Exponent three(3.0);
  const ModuliGrid g = sample_grid(beurling_function(three), three, 33, 33, 1.0, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "rankone_envelope_grid.csv";
  write_grid_csv(g, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("y\\x,0,", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 33);
  std::filesystem::remove(path);
}

TEST_CASE("envelope error is zero for closed-form samples") {
  const Exponent three(3.0);
  const ModuliGrid cf = sample_grid(IntegrandId::envelope(), three, 65, 65, 2.0, 2.0);
  CHECK(envelope_error(cf, three) == 0.0);
  CHECK(envelope_error(cf, three, 1.0) == 0.0);
}
