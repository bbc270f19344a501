#include "prodsurf/frame_reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prodsurf/parallel.hpp"

namespace prodsurf {

namespace {

constexpr cd I(0.0, 1.0);

using Coeff = Eigen::Matrix<cd, 9, 1>;  // E, u_z, A, γ₁, γ₂, f₁, f₂, C₁, C₂

Coeff coeff_at(const Theorem2Data& d, std::size_t k) {
  Coeff c;
  c << d.E[k], d.u_z[k], d.data.A[k], d.data.gamma1[k], d.data.gamma2[k], d.data.f1[k], d.data.f2[k], d.data.C1[k],
      d.data.C2[k];
  return c;
}

Vec3c cross_p(const Vec6c& Phi, const Vec3c& v, int factor) {
  const Vec3c p = factor == 0 ? Vec3c(Phi.head<3>()) : Vec3c(Phi.tail<3>());
  return bcross(p, v);
}

// J₁ = (p×, q×), J₂ = (−p×, q×) on T(S²×S²) ⊂ R³×R³.
Vec6c apply_J(int k, const Vec6c& Phi, const Vec6c& X) {
  Vec6c out;
  out.head<3>() = (k == 1 ? 1.0 : -1.0) * cross_p(Phi, X.head<3>(), 0);
  out.tail<3>() = cross_p(Phi, X.tail<3>(), 1);
  return out;
}

struct Derivs {
  Vec6c Phi_zz, Phi_zzb, xi_z, xi_zb;
};

Derivs frenet(const FrameState& s, const Coeff& c) {
  const double E = c(0).real(), C1 = c(7).real(), C2 = c(8).real();
  const cd uz = c(1), A = c(2), g1 = c(3), g2 = c(4), f1 = c(5), f2 = c(6);
  const Vec6c Ph = hat(s.Phi);
  const Vec6c Phzb = s.Phi_z.conjugate();
  const Vec6c xb = s.xi.conjugate();
  Derivs d;
  d.Phi_zz = 2.0 * uz * s.Phi_z + f1 * s.xi + f2 * xb + (0.5 * g1 * g2) * Ph;
  d.Phi_zzb = (-0.25 * E) * s.Phi + (0.25 * C1 * C2 * E) * Ph;
  d.xi_z = (-2.0 / E) * f2 * Phzb + A * s.xi - (0.5 * I * C1 * g2) * Ph;
  const Vec6c xib_z = (-2.0 / E) * f1 * Phzb - A * xb - (0.5 * I * C2 * g1) * Ph;
  d.xi_zb = xib_z.conjugate();
  return d;
}

FrameState derivative(const FrameState& s, const Coeff& c, int axis) {
  const Derivs d = frenet(s, c);
  const Vec6c Phzb = s.Phi_z.conjugate();
  FrameState out;
  if (axis == 0) {
    out.Phi = s.Phi_z + Phzb;
    out.Phi_z = d.Phi_zz + d.Phi_zzb;
    out.xi = d.xi_z + d.xi_zb;
  } else {
    out.Phi = I * (s.Phi_z - Phzb);
    out.Phi_z = I * (d.Phi_zz - d.Phi_zzb);
    out.xi = I * (d.xi_z - d.xi_zb);
  }
  return out;
}

FrameState axpy(const FrameState& s, double a, const FrameState& d) {
  return {s.Phi + a * d.Phi, s.Phi_z + a * d.Phi_z, s.xi + a * d.xi};
}

FrameState rk4(const FrameState& s, double h, const Coeff& c0, const Coeff& cm, const Coeff& c1, int axis) {
  const FrameState k1 = derivative(s, c0, axis);
  const FrameState k2 = derivative(axpy(s, 0.5 * h, k1), cm, axis);
  const FrameState k3 = derivative(axpy(s, 0.5 * h, k2), cm, axis);
  const FrameState k4 = derivative(axpy(s, h, k3), c1, axis);
  FrameState out = s;
  out.Phi += h / 6.0 * (k1.Phi + 2.0 * k2.Phi + 2.0 * k3.Phi + k4.Phi);
  out.Phi_z += h / 6.0 * (k1.Phi_z + 2.0 * k2.Phi_z + 2.0 * k3.Phi_z + k4.Phi_z);
  out.xi += h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
  out.Phi = out.Phi.real().cast<cd>();
  return out;
}

// Cubic interpolation of the coefficient at the middle of segment (k, k+1)
// on a line of n nodes. `at` wraps for periodic lines.
template <class At>
Coeff midpoint(At&& at, int k, int n, bool periodic) {
  if (periodic || (k >= 1 && k + 2 <= n - 1))
    return (-at(k - 1) + 9.0 * at(k) + 9.0 * at(k + 1) - at(k + 2)) / 16.0;
  if (k == 0) return (5.0 * at(0) + 15.0 * at(1) - 5.0 * at(2) + at(3)) / 16.0;
  return (5.0 * at(n - 1) + 15.0 * at(n - 2) - 5.0 * at(n - 3) + at(n - 4)) / 16.0;
}

FrameResiduals residuals_at(const FrameState& s, const Coeff& c) {
  return frame_residuals(s, c(0).real(), c(7).real(), c(8).real(), c(3), c(4));
}

void renormalize(FrameState& s) {
  for (int f = 0; f < 2; ++f) {
    auto seg = s.Phi.segment<3>(3 * f);
    seg /= std::sqrt(std::real(pairing(seg, seg)));
  }
}

struct LineResult {
  double closure = 0.0;  // periodic lines: gap after stepping past the last node
  bool aborted = false;
  std::string message;
  DriftReport drift;
};

// Integrates along the line through `start` in both directions. `idx(m)`
// maps a line position to a grid index.
template <class Idx>
LineResult integrate_line(const Theorem2Data& d, const IntegrateOptions& opts, Field<FrameState>& states,
                          Field<unsigned char>& filled, Idx&& idx, int start, int n, bool periodic, int axis) {
  LineResult res;
  const double h = d.data.grid.h;
  auto at = [&](int m) { return coeff_at(d, idx(periodic ? ((m % n) + n) % n : m)); };
  auto check = [&](const FrameState& s, int m) {
    const FrameResiduals r = residuals_at(s, at(m));
    res.drift.quadric = std::max(res.drift.quadric, r.quadric);
    res.drift.algebraic = std::max(res.drift.algebraic, r.algebraic);
    res.drift.j_relations = std::max(res.drift.j_relations, r.j_relations);
    const double worst = std::max({r.quadric, r.algebraic, r.j_relations});
    if (!(worst <= opts.drift_bound)) {
      std::ostringstream os;
      os << "frame drift " << worst << " exceeds bound " << opts.drift_bound << " at node " << idx(m);
      res.aborted = true;
      res.message = os.str();
      return false;
    }
    return true;
  };
  for (int dir : {1, -1}) {
    FrameState s = states[idx(start)];
    for (int m = start; dir > 0 ? m + 1 < n : m > 0; m += dir) {
      const int seg = dir > 0 ? m : m - 1;
      const Coeff mid = midpoint(at, seg, n, periodic);
      s = rk4(s, dir * h, at(m), mid, at(m + dir), axis);
      if (opts.renormalize) {
        renormalize(s);
        ++res.drift.renormalized_steps;
      }
      if (!check(s, m + dir)) return res;
      states[idx(m + dir)] = s;
      filled[idx(m + dir)] = 1;
    }
  }
  if (periodic) {
    const FrameState past = rk4(states[idx(n - 1)], h, at(n - 1), midpoint(at, n - 1, n, true), at(n), axis);
    const FrameState& first = states[idx(0)];
    res.closure = std::max({(past.Phi - first.Phi).norm(), (past.Phi_z - first.Phi_z).norm(), (past.xi - first.xi).norm()});
  }
  return res;
}

}  // namespace

Theorem2Data build_data(const ScalarField& X1, const ScalarField& X2, double t) {
  if (X1.grid != X2.grid) throw std::invalid_argument("X1 and X2 live on different grids");
  const GridSpec& g = X1.grid;
  Theorem2Data d;
  d.X1 = X1;
  d.X2 = X2;
  d.t = t;
  d.data = FundamentalData(g);
  d.E = ScalarField(g);
  d.u_z = ComplexField(g);
  ScalarField sum(g), diff(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    sum[k] = X1[k] + X2[k];
    diff[k] = X1[k] - X2[k];
  }
  const ComplexField sum_z = complex_derivatives(sum).first;
  const ComplexField diff_z = complex_derivatives(diff).first;
  const cd phase = std::exp(I * t);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double cp = std::cosh(sum[k]), cm = std::cosh(diff[k]);
    const double C1 = std::tanh(diff[k]), C2 = std::tanh(sum[k]);
    d.E[k] = 4.0 * cp * cm;
    d.data.u[k] = 0.5 * std::log(d.E[k]);
    d.data.C1[k] = C1;
    d.data.C2[k] = C2;
    const cd g1 = std::sqrt(2.0 * phase * cp / cm);
    const cd g2 = 2.0 * phase / g1;
    d.data.gamma1[k] = g1;
    d.data.gamma2[k] = g2;
    d.data.A[k] = 0.5 * (C2 * sum_z[k] - C1 * diff_z[k]);
    d.u_z[k] = 0.5 * (C2 * sum_z[k] + C1 * diff_z[k]);
    // f_j = −iγ_j (X1 + (−1)^j X2)_z
    d.data.f1[k] = -I * g1 * diff_z[k];
    d.data.f2[k] = -I * g2 * sum_z[k];
  }
  return d;
}

FrameResiduals frame_residuals(const FrameState& s, double E, double C1, double C2, cd gamma1, cd gamma2) {
  FrameResiduals r;
  for (int f = 0; f < 2; ++f) {
    const Vec3c p = s.Phi.segment<3>(3 * f);
    r.quadric = std::max(r.quadric, std::abs(pairing(p, p) - 1.0));
  }
  const Vec6c zb = s.Phi_z.conjugate(), xb = s.xi.conjugate();
  double a = 0.0;
  a = std::max(a, std::abs(pairing(s.Phi_z, s.Phi_z)) / E);
  a = std::max(a, std::abs(pairing(s.Phi_z, zb) - 0.5 * E) / E);
  a = std::max(a, std::abs(pairing(s.xi, s.xi)));
  a = std::max(a, std::abs(pairing(s.xi, xb) - 1.0));
  a = std::max(a, std::abs(pairing(s.Phi_z, s.xi)) / std::sqrt(E));
  a = std::max(a, std::abs(pairing(s.Phi_z, xb)) / std::sqrt(E));
  for (int f = 0; f < 2; ++f) {
    const Vec3c p = s.Phi.segment<3>(3 * f);
    a = std::max(a, std::abs(pairing(p, Vec3c(s.Phi_z.segment<3>(3 * f)))) / std::sqrt(E));
    a = std::max(a, std::abs(pairing(p, Vec3c(s.xi.segment<3>(3 * f)))));
  }
  r.algebraic = a;
  const Vec6c j1 = apply_J(1, s.Phi, s.Phi_z) - I * C1 * s.Phi_z - gamma1 * s.xi;
  const Vec6c j2 = apply_J(2, s.Phi, s.Phi_z) - I * C2 * s.Phi_z - gamma2 * xb;
  r.j_relations = std::max(j1.norm(), j2.norm()) / std::sqrt(E);
  return r;
}

FrameState initial_frame(const Theorem2Data& d, std::pair<int, int> node, std::optional<std::pair<Vec3, Vec3>> base) {
  const GridSpec& g = d.data.grid;
  if (node.first < 0 || node.first >= g.nx || node.second < 0 || node.second >= g.ny)
    throw std::out_of_range("base node outside the grid");
  const std::size_t k = g.index(node.first, node.second);
  const double E = d.E[k], C1 = d.data.C1[k], C2 = d.data.C2[k];
  const cd g1 = d.data.gamma1[k], g2 = d.data.gamma2[k];
  if (1.0 - C1 * C1 < 1e-12 || 1.0 - C2 * C2 < 1e-12)
    throw ReconstructionError("base node is a complex point");

  Vec3 p(1, 0, 0), q(1, 0, 0);
  if (base) {
    p = base->first.normalized();
    q = base->second.normalized();
  }
  const FactorModel sphere = FactorModel::embedded(FactorKind::sphere);
  auto null_vector = [&](const Vec3& x) {
    const Vec3 e1 = sphere.unit_tangent(x);
    return Vec3c((e1.cast<cd>() - I * bcross(x, e1).cast<cd>()) / std::sqrt(2.0));
  };
  const Vec3c e = null_vector(p), ep = null_vector(q);

  const cd alpha = std::sqrt(E * (1 + C1) * (1 - C2) / 8.0);
  const cd beta = -(1 + C2) * g1 * alpha / ((1 + C1) * std::conj(g2));
  const cd alphap = std::sqrt(E * (1 + C1) * (1 + C2) / 8.0);
  const cd betap = (1 - C2) * g1 * alphap / ((1 + C1) * std::conj(g2));

  FrameState s;
  s.Phi << p.cast<cd>(), q.cast<cd>();
  s.Phi_z << alpha * e + beta * e.conjugate(), alphap * ep + betap * ep.conjugate();
  s.xi << (1 - C1) * alpha * e - (1 + C1) * beta * e.conjugate(),
      (1 - C1) * alphap * ep - (1 + C1) * betap * ep.conjugate();
  s.xi *= I / g1;

  const FrameResiduals r = frame_residuals(s, E, C1, C2, g1, g2);
  if (std::max({r.quadric, r.algebraic, r.j_relations}) > 1e-8) {
    std::ostringstream os;
    os << "inconsistent frame constraints (" << r.quadric << ", " << r.algebraic << ", " << r.j_relations << ")";
    throw ReconstructionError(os.str());
  }
  return s;
}

Reconstruction integrate(const Theorem2Data& d, const IntegrateOptions& opts) {
  const GridSpec& g = d.data.grid;
  if (g.nx < 4 || g.ny < 4) throw StencilError("frame integration needs at least 4 nodes per axis");
  GridSpec out_grid = g;
  out_grid.periodic_x = out_grid.periodic_y = false;
  Reconstruction rec{ImmersedPatch(out_grid, {FactorModel::embedded(FactorKind::sphere),
                                              FactorModel::embedded(FactorKind::sphere)}),
                     Field<Vec6c>(out_grid, Vec6c::Zero()), Field<Vec6c>(out_grid, Vec6c::Zero()),
                     Field<unsigned char>(out_grid, 0), DriftReport{}, false, ""};

  double scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double rootE = std::sqrt(d.E[k]);
    scale = std::max(scale, 2.0 * std::abs(d.u_z[k]) + std::abs(d.data.A[k]) +
                                2.0 * (std::abs(d.data.f1[k]) + std::abs(d.data.f2[k])) / rootE + rootE);
  }
  rec.drift.step_scale = g.h * scale;
  rec.drift.under_resolved = rec.drift.step_scale > 0.5;

  const auto [i0, j0] = opts.base_node;
  Field<FrameState> states(g);
  states(i0, j0) = initial_frame(d, opts.base_node, opts.base_point);
  rec.filled(i0, j0) = 1;

  double closure[2] = {0.0, 0.0};
  auto merge = [&](const LineResult& r, int axis) {
    closure[axis] = std::max(closure[axis], r.closure);
    rec.drift.quadric = std::max(rec.drift.quadric, r.drift.quadric);
    rec.drift.algebraic = std::max(rec.drift.algebraic, r.drift.algebraic);
    rec.drift.j_relations = std::max(rec.drift.j_relations, r.drift.j_relations);
    rec.drift.renormalized_steps += r.drift.renormalized_steps;
    if (r.aborted && !rec.aborted) {
      rec.aborted = true;
      rec.message = r.message;
    }
  };

  const bool x_first = opts.order == IntegrationOrder::x_then_y;
  // First line through the base node.
  if (x_first)
    merge(integrate_line(d, opts, states, rec.filled, [&](int m) { return g.index(m, j0); }, i0, g.nx,
                         g.periodic_x, 0), 0);
  else
    merge(integrate_line(d, opts, states, rec.filled, [&](int m) { return g.index(i0, m); }, j0, g.ny,
                         g.periodic_y, 1), 1);

  if (!rec.aborted) {
    const int lines = x_first ? g.nx : g.ny;
    std::vector<LineResult> results(lines);
    parallel_for(static_cast<std::size_t>(lines), [&](std::size_t l) {
      const int c = static_cast<int>(l);
      if (x_first) {
        if (!rec.filled(c, j0)) return;
        results[l] = integrate_line(d, opts, states, rec.filled, [&](int m) { return g.index(c, m); }, j0, g.ny,
                                    g.periodic_y, 1);
      } else {
        if (!rec.filled(i0, c)) return;
        results[l] = integrate_line(d, opts, states, rec.filled, [&](int m) { return g.index(m, c); }, i0, g.nx,
                                    g.periodic_x, 0);
      }
    });
    for (const auto& r : results) merge(r, x_first ? 1 : 0);
  }

  rec.drift.closure_x = g.periodic_x ? closure[0] : -1.0;
  rec.drift.closure_y = g.periodic_y ? closure[1] : -1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!rec.filled[k]) continue;
    rec.patch.points[k] = states[k].Phi.real();
    rec.Phi_z[k] = states[k].Phi_z;
    rec.xi[k] = states[k].xi;
  }
  return rec;
}

ValidationReport validate(const Reconstruction& rec, const Theorem2Data& d) {
  ValidationReport v;
  const GridSpec& g = rec.patch.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!rec.filled[k]) continue;
    const Vec6& P = rec.patch.points[k];
    v.quadric = std::max({v.quadric, std::abs(P.head<3>().squaredNorm() - 1.0), std::abs(P.tail<3>().squaredNorm() - 1.0)});
    const Vec6c& z = rec.Phi_z[k];
    v.metric_state = std::max(v.metric_state, std::abs(2.0 * pairing(z, z.conjugate()).real() - d.E[k]));
    const Vec6 Fx = 2.0 * z.real(), Fy = -2.0 * z.imag();
    const double w1 = P.head<3>().dot(Fx.head<3>().cross(Fy.head<3>()));
    const double w2 = P.tail<3>().dot(Fx.tail<3>().cross(Fy.tail<3>()));
    v.kahler_state = std::max({v.kahler_state, std::abs((w1 + w2) / d.E[k] - d.data.C1[k]),
                               std::abs((-w1 + w2) / d.E[k] - d.data.C2[k])});
  }
  if (rec.aborted) {
    v.error = "reconstruction aborted: " + rec.message;
    return v;
  }
  try {
    LabOptions opts;
    opts.isothermal_tol = 1e-3;
    const TangentData t = tangent_data(rec.patch, opts);
    const KahlerFunctions kf = kahler_functions(rec.patch, t, opts);
    for (std::size_t k = 0; k < g.size(); ++k) {
      v.metric_stencil = std::max(v.metric_stencil, std::abs(t.E[k] - d.E[k]));
      v.kahler_stencil = std::max({v.kahler_stencil, std::abs(kf.C1[k] - d.data.C1[k]), std::abs(kf.C2[k] - d.data.C2[k])});
    }
  } catch (const std::exception& e) {
    v.error = e.what();
  }
  return v;
}

double max_point_distance(const Reconstruction& a, const Reconstruction& b) {
  if (a.patch.grid != b.patch.grid) throw std::invalid_argument("reconstructions on different grids");
  double m = 0.0;
  for (std::size_t k = 0; k < a.patch.grid.size(); ++k)
    if (a.filled[k] && b.filled[k]) m = std::max(m, (a.patch.points[k] - b.patch.points[k]).norm());
  return m;
}

FamilyComparison compare_family(const Reconstruction& a, const Reconstruction& b) {
  FamilyComparison c;
  c.max_distance = max_point_distance(a, b);
  for (std::size_t k = 0; k < a.patch.grid.size(); ++k) {
    if (!(a.filled[k] && b.filled[k])) continue;
    const double ma = 2.0 * pairing(a.Phi_z[k], a.Phi_z[k].conjugate()).real();
    const double mb = 2.0 * pairing(b.Phi_z[k], b.Phi_z[k].conjugate()).real();
    c.metric_difference = std::max(c.metric_difference, std::abs(ma - mb));
  }
  return c;
}

CurvatureReport theorem2_curvature(const Theorem2Data& d, const LabOptions& opts) {
  const ScalarField ones(d.data.grid, 1.0);
  return curvature_report(d.data, ones, ones, nullptr, opts);
}

IdentityReport theorem2_identities(const Theorem2Data& d, const LabOptions& opts) {
  return identity_suite(d.data, theorem2_curvature(d, opts), opts);
}

SolverPair solver_pair(int n, double L, Scheme scheme) {
  GridSpec g;
  g.nx = g.ny = n;
  g.h = L / (n - 1);
  const double reach = 1.5 * L;
  const ProfileSolution p1(0.3, 0.35, 0.4, -reach, reach), p2(1.9, -0.2, 0.5, -reach, reach);
  SolverConfig cfg;
  cfg.bc = Boundary::dirichlet;
  cfg.scheme = scheme;
  cfg.tol = 1e-11;
  SolverPair out;
  for (int which = 0; which < 2; ++which) {
    const ProfileSolution& p = which == 0 ? p1 : p2;
    ScalarField init = p.sample(g);
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) init(i, j) = 0.0;
    const SolveResult r = solve(init, cfg);
    (which == 0 ? out.X1 : out.X2) = r.X;
    out.iterations += r.iterations;
    out.residual = std::max(out.residual, r.residual);
  }
  return out;
}

}  // namespace prodsurf
