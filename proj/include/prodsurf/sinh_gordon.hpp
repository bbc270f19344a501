#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prodsurf/grid.hpp"

namespace prodsurf {

enum class Boundary { periodic, dirichlet };

/// five_point: ¼L₅X + ½sinh 2X − ρ, second order.
/// compact:    ¼L₉X + (I + h²/12·L₅)(½sinh 2X − ρ), the fourth-order
///             Mehrstellen scheme.
enum class Scheme { five_point, compact };

/// `linear` replaces ½sinh 2X by X (test hook).
enum class Nonlinearity { sinh, linear };

struct SolverConfig {
  Boundary bc = Boundary::periodic;  ///< Dirichlet data are the boundary values of the initial field
  double tol = 1e-10;                ///< sup-norm of the residual
  int max_iter = 50;
  double damping = 1.0;              ///< first trial step of each Newton iteration
  Scheme scheme = Scheme::five_point;
  Nonlinearity nonlinearity = Nonlinearity::sinh;
  std::optional<ScalarField> source;  ///< ρ on the right-hand side, zero when absent

  void validate() const;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual(last_residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};

struct SolveResult {
  ScalarField X;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;  ///< residual sup-norm before each iteration and at the end
};

/// 5-point Laplacian (periodic wrap or, for Dirichlet grids, interior nodes
/// only; boundary entries are zero).
ScalarField laplacian5(const ScalarField& X, Boundary bc);
/// 9-point Mehrstellen Laplacian (1/6h²)[4·edges + corners − 20·centre].
ScalarField laplacian9(const ScalarField& X, Boundary bc);

/// ¼ΔX + ½sinh 2X with the 5-point Laplacian. Dirichlet boundary entries are zero.
ScalarField residual(const ScalarField& X, Boundary bc = Boundary::periodic);
/// Residual of the discretization selected by cfg, including the source.
ScalarField residual(const ScalarField& X, const SolverConfig& cfg);

double sup_norm(const ScalarField& f);

/// Damped Newton iteration with backtracking halving (minimum step 1e−6)
/// and a sparse LU solve per step. Throws SolveError on non-convergence,
/// stalled line search or a singular Jacobian.
SolveResult solve(const ScalarField& initial, const SolverConfig& cfg);

struct ConvergenceStudy {
  std::vector<double> h;
  std::vector<double> errors;
  double order = 0.0;  ///< least-squares slope of log(error) against log(h)
  bool exact = false;  ///< every error ≤ 1e−12; order is then meaningless
};

/// Needs at least three levels.
ConvergenceStudy convergence_study(std::vector<double> h, std::vector<double> errors);
/// Runs `error_at(n)` for each grid size n; h is taken from `spacing(n)`.
ConvergenceStudy convergence_study(const std::vector<int>& levels, const std::function<double(int)>& spacing,
                                   const std::function<double(int)>& error_at);

/// Travelling-wave solution X(s), s = cosθ·x + sinθ·y, of X'' = −2 sinh 2X,
/// tabulated with RK4 on [s_min, s_max] and evaluated by cubic Hermite
/// interpolation. Exact solution of the PDE up to the table error (~1e−14).
class ProfileSolution {
 public:
  ProfileSolution(double angle, double value0, double slope0, double s_min, double s_max, double ds = 2e-4);

  double operator()(double x, double y) const;
  double along(double s) const;
  double derivative(double s) const;
  ScalarField sample(const GridSpec& g) const;

 private:
  double c_, s_;
  double s_min_, ds_;
  std::vector<double> X_, dX_;
};

/// Manufactured problem on a Dirichlet square: X_m = 0.5 sin(1.3x + 0.2) cos(0.7y − 0.1)
/// and ρ = ¼ΔX_m + ½sinh 2X_m (or + X_m for the linear hook), on [0, L]²
/// with n×n nodes.
struct ManufacturedProblem {
  GridSpec grid;
  ScalarField exact;
  ScalarField source;
  ScalarField initial;  ///< exact on the boundary, zero inside
};

ManufacturedProblem manufactured_problem(int n, double L = 1.5, Nonlinearity nl = Nonlinearity::sinh);

/// Max error of the Dirichlet solve of the manufactured problem.
double manufactured_error(int n, Scheme scheme, Nonlinearity nl = Nonlinearity::sinh);

}  // namespace prodsurf
