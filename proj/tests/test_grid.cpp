#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "prodsurf/grid.hpp"

using namespace prodsurf;

namespace {

GridSpec box(int n, double x0, double h) {
  GridSpec g;
  g.nx = g.ny = n;
  g.x0 = g.y0 = x0;
  g.h = h;
  return g;
}

double max_err_plane_wave(int n) {
  const GridSpec g = torus_grid(n);
  ComplexField f(g);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f(i, j) = std::exp(cd(0, 1) * (g.x(i) + g.y(j)));
  const auto [fz, fzb] = complex_derivatives(f);
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    err = std::max(err, std::abs(fz[k] - 0.5 * cd(0, 1) * cd(1, -1) * f[k]));
  return err;
}

}  // namespace

TEST_CASE("constant field has zero derivatives") {
  const GridSpec g = box(7, 0.0, 0.1);
  const ScalarField f(g, 3.25);
  const auto [fz, fzb] = complex_derivatives(f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(std::abs(fz[k]) < 1e-12);
    CHECK(std::abs(fzb[k]) < 1e-12);
  }
}

TEST_CASE("linear field x gives (1/2, 1/2) including one-sided boundary rows") {
  const GridSpec g = box(9, -0.4, 0.1);
  const ScalarField f = sample(g, [](double x, double) { return x; });
  const auto [fz, fzb] = complex_derivatives(f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(std::abs(fz[k] - cd(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(fzb[k] - cd(0.5, 0.0)) < 1e-12);
  }
}

TEST_CASE("plane wave derivative converges at fourth order") {
  const double e16 = max_err_plane_wave(16), e32 = max_err_plane_wave(32);
  CHECK(e32 < 1e-4);
  CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("one-sided stencils are exact on quartics") {
  const GridSpec g = box(8, 0.0, 0.25);
  const ScalarField f = sample(g, [](double x, double y) { return std::pow(x, 4) - 2 * x * x * y + y * y * y; });
  const ScalarField fx = d_dx(f), fxx = d_dxx(f), fyy = d_dyy(f);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      CHECK(fx(i, j) == doctest::Approx(4 * x * x * x - 4 * x * y).epsilon(1e-10));
      CHECK(fxx(i, j) == doctest::Approx(12 * x * x - 4 * y).epsilon(1e-9));
      CHECK(fyy(i, j) == doctest::Approx(6 * y).epsilon(1e-9));
    }
}

TEST_CASE("grids smaller than the stencil are rejected") {
  const GridSpec g = box(4, 0.0, 0.1);
  const ScalarField f(g, 1.0);
  CHECK_THROWS_AS(complex_derivatives(f), StencilError);
  GridSpec g5 = box(5, 0.0, 0.1);
  CHECK_NOTHROW(d_dx(ScalarField(g5, 1.0)));
  CHECK_THROWS_AS(d_dxx(ScalarField(g5, 1.0)), StencilError);
}
