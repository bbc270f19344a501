#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "prodsurf/sinh_gordon.hpp"

using namespace prodsurf;

namespace {

GridSpec dirichlet_square(int n, double L) {
  GridSpec g;
  g.nx = g.ny = n;
  g.h = L / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("residual examples") {
  const GridSpec g = torus_grid(32);
  CHECK(sup_norm(residual(ScalarField(g, 0.0))) == 0.0);
  const ScalarField r1 = residual(ScalarField(g, 1.0));
  for (double v : r1.values) CHECK(v == doctest::Approx(1.8134302039).epsilon(1e-10));

  const GridSpec g64 = torus_grid(64);
  const ScalarField X = sample(g64, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const ScalarField r = residual(X);
  // Node 16 sits at π/2 on a 64-node torus.
  CHECK(r(16, 16) == doctest::Approx(-0.5 + 0.5 * std::sinh(2.0)).epsilon(1e-3));
  CHECK(std::abs(r(16, 16) - 1.3134302) < 1e-3);
}

TEST_CASE("five-point Laplacian is symmetric on periodic grids") {
  std::mt19937 rng(11);
  std::normal_distribution<double> n01;
  const GridSpec g = torus_grid(24);
  ScalarField X(g), Y(g);
  for (auto& v : X.values) v = n01(rng);
  for (auto& v : Y.values) v = n01(rng);
  const ScalarField LX = laplacian5(X, Boundary::periodic), LY = laplacian5(Y, Boundary::periodic);
  double a = 0, b = 0, s = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    a += LX[k] * Y[k];
    b += X[k] * LY[k];
    s += std::abs(LX[k] * Y[k]);
  }
  CHECK(std::abs(a - b) <= 1e-12 * s);
}

TEST_CASE("zero is a fixed point") {
  const GridSpec g = torus_grid(16);
  const SolveResult r = solve(ScalarField(g, 0.0), SolverConfig{});
  CHECK(r.iterations == 0);
  CHECK(sup_norm(r.X) == 0.0);
}

TEST_CASE("small random periodic data relax to the zero solution") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  const GridSpec g = torus_grid(32);
  ScalarField X(g);
  for (auto& v : X.values) v = u(rng);
  const SolveResult r = solve(X, SolverConfig{});
  CHECK(r.residual <= 1e-10);
  CHECK(sup_norm(r.X) < 1e-9);
}

TEST_CASE("manufactured solution converges at second order with the five-point scheme") {
  const auto study = convergence_study(
      {17, 33, 65}, [](int n) { return 1.5 / (n - 1); },
      [](int n) { return manufactured_error(n, Scheme::five_point); });
  CHECK(!study.exact);
  CHECK(study.order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("compact scheme converges at fourth order") {
  const auto study = convergence_study(
      {17, 33, 65}, [](int n) { return 1.5 / (n - 1); },
      [](int n) { return manufactured_error(n, Scheme::compact); });
  CHECK(study.order == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("linear hook with an exact eigenmode") {
  auto err = [](int n) {
    const GridSpec g = torus_grid(n);
    const ScalarField exact = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
    SolverConfig cfg;
    cfg.nonlinearity = Nonlinearity::linear;
    cfg.source = sample(g, [](double x, double y) { return 0.5 * std::sin(x) * std::sin(y); });
    const SolveResult r = solve(ScalarField(g, 0.0), cfg);
    double e = 0;
    for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(r.X[k] - exact[k]));
    return e;
  };
  const auto study = convergence_study({16, 32, 64}, [](int n) { return 2 * M_PI / n; }, err);
  CHECK(study.order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("exact grid solutions are reported as exact") {
  const auto study = convergence_study({0.1, 0.05, 0.025}, {0.0, 1e-13, 0.0});
  CHECK(study.exact);
  CHECK_THROWS_AS(convergence_study({0.1, 0.05}, {1e-3, 2e-4}), std::invalid_argument);
}

TEST_CASE("the equation is odd: negated data give the bitwise negated solution") {
  const ProfileSolution prof(0.4, 0.3, 0.5, -3.0, 3.0);
  const GridSpec g = dirichlet_square(21, 1.5);
  ScalarField init = prof.sample(g);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) init(i, j) = 0.0;
  ScalarField neg = init;
  for (auto& v : neg.values) v = -v;
  for (Scheme s : {Scheme::five_point, Scheme::compact}) {
    SolverConfig cfg;
    cfg.bc = Boundary::dirichlet;
    cfg.scheme = s;
    const SolveResult a = solve(init, cfg), b = solve(neg, cfg);
    CHECK(a.iterations == b.iterations);
    bool bitwise = true;
    for (std::size_t k = 0; k < g.size(); ++k) bitwise = bitwise && (a.X[k] == -b.X[k]);
    CHECK(bitwise);
    // Idempotent: solving again from the solution does nothing.
    const SolveResult c = solve(a.X, cfg);
    CHECK(c.iterations == 0);
  }
}

TEST_CASE("profile solutions satisfy the ODE and the compact solve recovers them") {
  const ProfileSolution prof(0.7, 0.4, -0.3, -4.0, 4.0);
  for (double s : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
    const double h = 1e-3;
    const double second = (prof.along(s + h) - 2 * prof.along(s) + prof.along(s - h)) / (h * h);
    CHECK(second == doctest::Approx(-2.0 * std::sinh(2.0 * prof.along(s))).epsilon(1e-5));
  }
  CHECK(prof.along(0.0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(prof.derivative(0.0) == doctest::Approx(-0.3).epsilon(1e-12));

  const GridSpec g = dirichlet_square(33, 1.5);
  const ScalarField exact = prof.sample(g);
  ScalarField init(g, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) init(i, j) = exact(i, j);
  SolverConfig cfg;
  cfg.bc = Boundary::dirichlet;
  cfg.scheme = Scheme::compact;
  const SolveResult r = solve(init, cfg);
  double e = 0;
  for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(r.X[k] - exact[k]));
  CHECK(e < 1e-6);
}

TEST_CASE("solver failures") {
  const GridSpec g = torus_grid(16);
  SolverConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  ScalarField big = sample(g, [](double x, double y) { return 2.0 * std::sin(x) * std::cos(2 * y); });
  CHECK_THROWS_AS(solve(big, cfg), SolveError);
  try {
    solve(big, cfg);
  } catch (const SolveError& e) {
    CHECK(e.last_residual > 1e-14);
  }
  SolverConfig bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(solve(ScalarField(g, 0.0), bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.bc = Boundary::dirichlet;
  CHECK_THROWS_AS(solve(ScalarField(g, 0.0), bad), std::invalid_argument);
}
