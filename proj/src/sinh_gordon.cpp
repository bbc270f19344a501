#include "prodsurf/sinh_gordon.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prodsurf {

namespace {

bool on_boundary(const GridSpec& g, int i, int j) { return i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1; }

int wrap(int k, int n) { return (k % n + n) % n; }

void require_grid(const GridSpec& g, Boundary bc) {
  if (g.nx < 5 || g.ny < 5) throw StencilError("sinh-Gordon grids need at least 5 nodes per axis");
  if (!(g.h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if ((bc == Boundary::periodic) != (g.periodic_x && g.periodic_y) || g.periodic_x != g.periodic_y)
    throw std::invalid_argument("grid periodic flags do not match the boundary condition");
}

// Nonzero weights of a stencil at node (i, j): (neighbour index, weight).
template <class Emit>
void stencil5(const GridSpec& g, int i, int j, Emit&& emit) {
  const double w = 1.0 / (g.h * g.h);
  emit(g.index(i, j), -4.0 * w);
  emit(g.index(wrap(i + 1, g.nx), j), w);
  emit(g.index(wrap(i - 1, g.nx), j), w);
  emit(g.index(i, wrap(j + 1, g.ny)), w);
  emit(g.index(i, wrap(j - 1, g.ny)), w);
}

template <class Emit>
void stencil9(const GridSpec& g, int i, int j, Emit&& emit) {
  const double w = 1.0 / (6.0 * g.h * g.h);
  emit(g.index(i, j), -20.0 * w);
  for (int d = -1; d <= 1; d += 2) {
    emit(g.index(wrap(i + d, g.nx), j), 4.0 * w);
    emit(g.index(i, wrap(j + d, g.ny)), 4.0 * w);
    for (int e = -1; e <= 1; e += 2) emit(g.index(wrap(i + d, g.nx), wrap(j + e, g.ny)), w);
  }
}

template <class Stencil>
ScalarField apply(const ScalarField& X, Boundary bc, Stencil&& st) {
  const GridSpec& g = X.grid;
  require_grid(g, bc);
  ScalarField out(g, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (bc == Boundary::dirichlet && on_boundary(g, i, j)) continue;
      double acc = 0.0;
      st(g, i, j, [&](std::size_t k, double w) { acc += w * X[k]; });
      out(i, j) = acc;
    }
  return out;
}

double nonlinear(double x, Nonlinearity nl) { return nl == Nonlinearity::sinh ? 0.5 * std::sinh(2.0 * x) : x; }
double nonlinear_prime(double x, Nonlinearity nl) { return nl == Nonlinearity::sinh ? std::cosh(2.0 * x) : 1.0; }

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
}

ScalarField laplacian5(const ScalarField& X, Boundary bc) {
  return apply(X, bc, [](const GridSpec& g, int i, int j, auto&& e) { stencil5(g, i, j, e); });
}

ScalarField laplacian9(const ScalarField& X, Boundary bc) {
  return apply(X, bc, [](const GridSpec& g, int i, int j, auto&& e) { stencil9(g, i, j, e); });
}

ScalarField residual(const ScalarField& X, Boundary bc) {
  SolverConfig cfg;
  cfg.bc = bc;
  return residual(X, cfg);
}

ScalarField residual(const ScalarField& X, const SolverConfig& cfg) {
  const GridSpec& g = X.grid;
  if (cfg.source && cfg.source->grid != g) throw std::invalid_argument("source grid does not match the field");
  ScalarField q(g);  // ½sinh 2X − ρ
  for (std::size_t k = 0; k < g.size(); ++k)
    q[k] = nonlinear(X[k], cfg.nonlinearity) - (cfg.source ? (*cfg.source)[k] : 0.0);
  ScalarField r;
  if (cfg.scheme == Scheme::five_point) {
    r = laplacian5(X, cfg.bc);
    for (std::size_t k = 0; k < g.size(); ++k) r[k] = 0.25 * r[k] + q[k];
  } else {
    r = laplacian9(X, cfg.bc);
    const ScalarField lq = laplacian5(q, cfg.bc);
    const double c = g.h * g.h / 12.0;
    for (std::size_t k = 0; k < g.size(); ++k) r[k] = 0.25 * r[k] + q[k] + c * lq[k];
  }
  if (cfg.bc == Boundary::dirichlet)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (on_boundary(g, i, j)) r(i, j) = 0.0;
  return r;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

SolveResult solve(const ScalarField& initial, const SolverConfig& cfg) {
  cfg.validate();
  const GridSpec& g = initial.grid;
  require_grid(g, cfg.bc);
  for (double v : initial.values)
    if (!std::isfinite(v)) throw std::invalid_argument("initial field has non-finite values");

  // Unknowns: every node (periodic) or interior nodes (Dirichlet).
  std::vector<int> slot(g.size(), -1);
  int unknowns = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (cfg.bc == Boundary::periodic || !on_boundary(g, i, j)) slot[g.index(i, j)] = unknowns++;

  SolveResult out;
  out.X = initial;
  ScalarField r = residual(out.X, cfg);
  double rn = sup_norm(r);
  out.history.push_back(rn);

  const double c = g.h * g.h / 12.0;
  for (int it = 0; it < cfg.max_iter && rn > cfg.tol; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(unknowns) * (cfg.scheme == Scheme::compact ? 14 : 5));
    Eigen::VectorXd rhs(unknowns);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int row = slot[g.index(i, j)];
        if (row < 0) continue;
        rhs(row) = -r(i, j);
        auto add = [&](std::size_t k, double w) {
          if (slot[k] >= 0) trip.emplace_back(row, slot[k], w);
        };
        if (cfg.scheme == Scheme::five_point) {
          stencil5(g, i, j, [&](std::size_t k, double w) { add(k, 0.25 * w); });
          add(g.index(i, j), nonlinear_prime(out.X(i, j), cfg.nonlinearity));
        } else {
          stencil9(g, i, j, [&](std::size_t k, double w) { add(k, 0.25 * w); });
          add(g.index(i, j), nonlinear_prime(out.X(i, j), cfg.nonlinearity));
          stencil5(g, i, j, [&](std::size_t k, double w) { add(k, c * w * nonlinear_prime(out.X[k], cfg.nonlinearity)); });
        }
      }
    Eigen::SparseMatrix<double> J(unknowns, unknowns);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw SolveError("singular Newton Jacobian: " + lu.lastErrorMessage(), rn, it);
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw SolveError("Newton linear solve failed", rn, it);

    double step = cfg.damping;
    for (;;) {
      ScalarField trial = out.X;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (slot[k] >= 0) trial[k] += step * delta(slot[k]);
      ScalarField tr = residual(trial, cfg);
      const double tn = sup_norm(tr);
      if (std::isfinite(tn) && tn < rn) {
        out.X = std::move(trial);
        r = std::move(tr);
        rn = tn;
        break;
      }
      step *= 0.5;
      if (step < 1e-6) {
        std::ostringstream os;
        os << "line search stalled at residual " << rn << " after " << it << " iterations";
        throw SolveError(os.str(), rn, it);
      }
    }
    out.iterations = it + 1;
    out.history.push_back(rn);
  }
  out.residual = rn;
  if (rn > cfg.tol) {
    std::ostringstream os;
    os << "no convergence in " << cfg.max_iter << " iterations, residual " << rn;
    throw SolveError(os.str(), rn, out.iterations);
  }
  return out;
}

ConvergenceStudy convergence_study(std::vector<double> h, std::vector<double> errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("convergence study: size mismatch");
  if (h.size() < 3) throw std::invalid_argument("convergence study needs at least three levels");
  ConvergenceStudy s;
  s.h = std::move(h);
  s.errors = std::move(errors);
  s.exact = std::all_of(s.errors.begin(), s.errors.end(), [](double e) { return std::abs(e) <= 1e-12; });
  if (s.exact) return s;
  double mx = 0, my = 0;
  const double n = static_cast<double>(s.h.size());
  for (std::size_t k = 0; k < s.h.size(); ++k) {
    mx += std::log(s.h[k]) / n;
    my += std::log(s.errors[k]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < s.h.size(); ++k) {
    const double dx = std::log(s.h[k]) - mx;
    sxy += dx * (std::log(s.errors[k]) - my);
    sxx += dx * dx;
  }
  s.order = sxy / sxx;
  return s;
}

ConvergenceStudy convergence_study(const std::vector<int>& levels, const std::function<double(int)>& spacing,
                                   const std::function<double(int)>& error_at) {
  std::vector<double> h, e;
  for (int n : levels) {
    h.push_back(spacing(n));
    e.push_back(error_at(n));
  }
  return convergence_study(std::move(h), std::move(e));
}

ProfileSolution::ProfileSolution(double angle, double value0, double slope0, double s_min, double s_max, double ds)
    : c_(std::cos(angle)), s_(std::sin(angle)), s_min_(s_min) {
  if (!(s_max > s_min) || !(ds > 0.0)) throw std::invalid_argument("profile range must be nonempty");
  const int steps = static_cast<int>(std::ceil((s_max - s_min) / ds));
  ds_ = (s_max - s_min) / steps;
  // Integrate forward and backward from s = 0 so the initial data sit at 0.
  auto rhs = [](double x) { return -2.0 * std::sinh(2.0 * x); };
  auto rk4 = [&](double& x, double& v, double h) {
    const double k1x = v, k1v = rhs(x);
    const double k2x = v + 0.5 * h * k1v, k2v = rhs(x + 0.5 * h * k1x);
    const double k3x = v + 0.5 * h * k2v, k3v = rhs(x + 0.5 * h * k2x);
    const double k4x = v + h * k3v, k4v = rhs(x + h * k3x);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  };
  X_.assign(steps + 1, 0.0);
  dX_.assign(steps + 1, 0.0);
  // Node closest to s = 0 (clamped into range) carries the initial data.
  const int k0 = std::clamp(static_cast<int>(std::lround(-s_min / ds_)), 0, steps);
  const double s0 = s_min + k0 * ds_;
  double x = value0, v = slope0;
  // Move the initial data from 0 to the grid node s0 with fine substeps.
  {
    const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(s0) / (0.1 * ds_))));
    for (int q = 0; q < sub; ++q) rk4(x, v, s0 / sub);
  }
  X_[k0] = x;
  dX_[k0] = v;
  for (int k = k0; k < steps; ++k) {
    rk4(x, v, ds_);
    X_[k + 1] = x;
    dX_[k + 1] = v;
  }
  x = X_[k0];
  v = dX_[k0];
  for (int k = k0; k > 0; --k) {
    rk4(x, v, -ds_);
    X_[k - 1] = x;
    dX_[k - 1] = v;
  }
}

double ProfileSolution::along(double s) const {
  const double t = (s - s_min_) / ds_;
  const int n = static_cast<int>(X_.size()) - 1;
  if (t < -1e-9 || t > n + 1e-9) throw std::out_of_range("profile evaluated outside its table");
  const int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
  const double u = t - k;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * X_[k] + h10 * ds_ * dX_[k] + h01 * X_[k + 1] + h11 * ds_ * dX_[k + 1];
}

double ProfileSolution::derivative(double s) const {
  const double t = (s - s_min_) / ds_;
  const int n = static_cast<int>(X_.size()) - 1;
  const int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
  const double u = t - k;
  const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
  const double d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
  return (d00 * X_[k] + d01 * X_[k + 1]) / ds_ + d10 * dX_[k] + d11 * dX_[k + 1];
}

double ProfileSolution::operator()(double x, double y) const { return along(c_ * x + s_ * y); }

ScalarField ProfileSolution::sample(const GridSpec& g) const {
  return prodsurf::sample(g, [this](double x, double y) { return (*this)(x, y); });
}

ManufacturedProblem manufactured_problem(int n, double L, Nonlinearity nl) {
  ManufacturedProblem p;
  p.grid.nx = p.grid.ny = n;
  p.grid.h = L / (n - 1);
  auto Xm = [](double x, double y) { return 0.5 * std::sin(1.3 * x + 0.2) * std::cos(0.7 * y - 0.1); };
  p.exact = sample(p.grid, Xm);
  p.source = sample(p.grid, [&](double x, double y) {
    const double X = Xm(x, y);
    const double lap = -(1.3 * 1.3 + 0.7 * 0.7) * X;
    return 0.25 * lap + (nl == Nonlinearity::sinh ? 0.5 * std::sinh(2.0 * X) : X);
  });
  p.initial = ScalarField(p.grid, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (on_boundary(p.grid, i, j)) p.initial(i, j) = p.exact(i, j);
  return p;
}

double manufactured_error(int n, Scheme scheme, Nonlinearity nl) {
  const ManufacturedProblem p = manufactured_problem(n, 1.5, nl);
  SolverConfig cfg;
  cfg.bc = Boundary::dirichlet;
  cfg.scheme = scheme;
  cfg.nonlinearity = nl;
  cfg.tol = 1e-11;
  cfg.source = p.source;
  const SolveResult r = solve(p.initial, cfg);
  double e = 0.0;
  for (std::size_t k = 0; k < r.X.size(); ++k) e = std::max(e, std::abs(r.X[k] - p.exact[k]));
  return e;
}

}  // namespace prodsurf
