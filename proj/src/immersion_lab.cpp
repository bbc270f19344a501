#include "prodsurf/immersion_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "prodsurf/parallel.hpp"

namespace prodsurf {

namespace {

constexpr cd I(0.0, 1.0);

bool interior(const GridSpec& g, int i, int j) {
  return (g.periodic_x || (i > 0 && i < g.nx - 1)) && (g.periodic_y || (j > 0 && j < g.ny - 1));
}

Vec3 head(const Vec6& v) { return v.head<3>(); }
Vec3 tail(const Vec6& v) { return v.tail<3>(); }

Vec6c conj6(const Vec6c& v) { return v.conjugate(); }

// Positively oriented ON basis of T(Σ₁×Σ₂) at p.
std::array<Vec6, 4> product_basis(const ProductModel& m, const Vec6& p) {
  const Vec3 e1 = m.first.unit_tangent(head(p));
  const Vec3 f1 = m.second.unit_tangent(tail(p));
  std::array<Vec6, 4> b;
  b[0] << e1, Vec3::Zero();
  b[1] << m.first.j<double>(head(p), e1), Vec3::Zero();
  b[2] << Vec3::Zero(), f1;
  b[3] << Vec3::Zero(), m.second.j<double>(tail(p), f1);
  return b;
}

}  // namespace

TangentData tangent_data(const ImmersedPatch& patch, const LabOptions& opts) {
  const GridSpec& g = patch.grid;
  const ProductModel& m = patch.model;
  for (const Vec6& p : patch.points.values) {
    m.first.require_domain(head(p));
    m.second.require_domain(tail(p));
  }
  TangentData t;
  t.Fx = d_dx(patch.points);
  t.Fy = d_dy(patch.points);
  t.Dxx = d_dxx(patch.points);
  t.Dyy = d_dyy(patch.points);
  t.Dxy = d_dy(t.Fx);
  t.E = ScalarField(g);
  t.K1 = ScalarField(g);
  t.K2 = ScalarField(g);

  parallel_for(g.size(), [&](std::size_t k) {
    const Vec6& p = patch.points[k];
    const Vec6 Fx = m.project_tangent<double>(p, t.Fx[k]);
    const Vec6 Fy = m.project_tangent<double>(p, t.Fy[k]);
    t.Fx[k] = Fx;
    t.Fy[k] = Fy;
    t.Dxx[k] = m.project_tangent<double>(p, t.Dxx[k] + m.christoffel<double>(p, Fx, Fx));
    t.Dxy[k] = m.project_tangent<double>(p, t.Dxy[k] + m.christoffel<double>(p, Fx, Fy));
    t.Dyy[k] = m.project_tangent<double>(p, t.Dyy[k] + m.christoffel<double>(p, Fy, Fy));
    t.E[k] = 0.5 * (m.metric<double>(p, Fx, Fx) + m.metric<double>(p, Fy, Fy));
    t.K1[k] = m.first.curvature(head(p));
    t.K2[k] = m.second.curvature(tail(p));
  });

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const Vec6& p = patch.points[k];
      const double E = t.E[k];
      if (!(E >= opts.immersion_eps)) {
        std::ostringstream os;
        os << "degenerate immersion at node (" << i << ", " << j << "): e^{2u} = " << E;
        throw AnalysisError(os.str());
      }
      if (!interior(g, i, j)) continue;
      const double dxx = m.metric<double>(p, t.Fx[k], t.Fx[k]);
      const double dyy = m.metric<double>(p, t.Fy[k], t.Fy[k]);
      const double dxy = m.metric<double>(p, t.Fx[k], t.Fy[k]);
      if (std::abs(dxx - dyy) > opts.isothermal_tol * E || std::abs(dxy) > opts.isothermal_tol * E) {
        std::ostringstream os;
        os << "coordinates are not isothermal at node (" << i << ", " << j << "): |Fx|^2 = " << dxx
           << ", |Fy|^2 = " << dyy << ", <Fx,Fy> = " << dxy;
        throw AnalysisError(os.str());
      }
    }
  return t;
}

KahlerFunctions kahler_functions(const ImmersedPatch& patch, const LabOptions& opts) {
  return kahler_functions(patch, tangent_data(patch, opts), opts);
}

KahlerFunctions kahler_functions(const ImmersedPatch& patch, const TangentData& t, const LabOptions& opts) {
  const ProductModel& m = patch.model;
  KahlerFunctions out{ScalarField(patch.grid), ScalarField(patch.grid), 0.0};
  for (std::size_t k = 0; k < patch.grid.size(); ++k) {
    const Vec6& p = patch.points[k];
    for (int c = 1; c <= 2; ++c) {
      const double v = m.omega<double>(c, p, t.Fx[k], t.Fy[k]) / t.E[k];
      out.max_overshoot = std::max(out.max_overshoot, std::abs(v) - 1.0);
      (c == 1 ? out.C1 : out.C2)[k] = std::clamp(v, -1.0, 1.0);
    }
  }
  if (out.max_overshoot > opts.clamp_tol) {
    std::ostringstream os;
    os << "Kahler function exceeds [-1, 1] by " << out.max_overshoot << " (tolerance " << opts.clamp_tol << ")";
    throw AnalysisError(os.str());
  }
  out.max_overshoot = std::max(out.max_overshoot, 0.0);
  return out;
}

std::pair<ScalarField, ScalarField> jacobians(const ScalarField& C1, const ScalarField& C2) {
  if (C1.grid != C2.grid) throw std::invalid_argument("jacobians: grid mismatch");
  ScalarField j1(C1.grid), j2(C1.grid);
  for (std::size_t k = 0; k < C1.size(); ++k) {
    j1[k] = 0.5 * (C1[k] - C2[k]);
    j2[k] = 0.5 * (C1[k] + C2[k]);
  }
  return {j1, j2};
}

Field<Vec6c> normal_frame(const ImmersedPatch& patch, const LabOptions& opts) {
  return normal_frame(patch, tangent_data(patch, opts));
}

Field<Vec6c> normal_frame(const ImmersedPatch& patch, const TangentData& t) {
  const ProductModel& m = patch.model;
  const GridSpec& g = patch.grid;
  Field<Vec6> T1(g), T2(g), N(g);
  auto G = [&](std::size_t k, const Vec6& a, const Vec6& b) { return m.metric<double>(patch.points[k], a, b); };
  parallel_for(g.size(), [&](std::size_t k) {
    T1[k] = t.Fx[k] / std::sqrt(G(k, t.Fx[k], t.Fx[k]));
    T2[k] = t.Fy[k] - G(k, t.Fy[k], T1[k]) * T1[k];
    T2[k] /= std::sqrt(G(k, T2[k], T2[k]));
  });
  // Unit normal at node k closest to v: project onto the tangent space of
  // the product, drop the surface part, normalize.
  auto unit_normal = [&](std::size_t k, const Vec6& v) {
    const auto basis = product_basis(m, patch.points[k]);
    Vec6 w = Vec6::Zero();
    for (const Vec6& b : basis) w += G(k, v, b) * b;
    w -= G(k, w, T1[k]) * T1[k] + G(k, w, T2[k]) * T2[k];
    return Vec6(w / std::sqrt(G(k, w, w)));
  };

  // A pointwise choice of N has to be singular somewhere on a sphere factor.
  // Carrying N from the center along the middle row, then along columns,
  // gives a gauge that is smooth on the whole patch.
  const int ci = g.nx / 2, cj = g.ny / 2;
  {
    const std::size_t c = g.index(ci, cj);
    const auto basis = product_basis(m, patch.points[c]);
    Vec6 n0 = basis[0] - G(c, basis[0], T1[c]) * T1[c] - G(c, basis[0], T2[c]) * T2[c];
    N[c] = unit_normal(c, G(c, n0, n0) < 1e-12 ? basis[2] : basis[0]);
  }
  for (int i = ci + 1; i < g.nx; ++i) N(i, cj) = unit_normal(g.index(i, cj), N(i - 1, cj));
  for (int i = ci - 1; i >= 0; --i) N(i, cj) = unit_normal(g.index(i, cj), N(i + 1, cj));
  parallel_for(static_cast<std::size_t>(g.nx), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = cj + 1; j < g.ny; ++j) N(i, j) = unit_normal(g.index(i, j), N(i, j - 1));
    for (int j = cj - 1; j >= 0; --j) N(i, j) = unit_normal(g.index(i, j), N(i, j + 1));
  });

  Field<Vec6c> xi(g, Vec6c::Zero());
  parallel_for(g.size(), [&](std::size_t k) {
    const auto basis = product_basis(m, patch.points[k]);
    // N̄ is minus the oriented cross product of (t1, t2, N) in basis
    // coordinates. With this sign the normal part of J₁F_z is a multiple
    // of ξ, which is what makes |γₖ|² = e^{2u}(1 − Cₖ²)/2 hold.
    Eigen::Matrix4d rows;
    for (int b = 0; b < 4; ++b) {
      rows(0, b) = G(k, T1[k], basis[b]);
      rows(1, b) = G(k, T2[k], basis[b]);
      rows(2, b) = G(k, N[k], basis[b]);
    }
    Vec6 Nb = Vec6::Zero();
    for (int b = 0; b < 4; ++b) {
      Eigen::Matrix4d M = rows;
      M.row(3).setZero();
      M(3, b) = 1.0;
      Nb += M.determinant() * basis[b];
    }
    Nb /= -std::sqrt(G(k, Nb, Nb));
    xi[k] = (N[k].cast<cd>() - I * Nb.cast<cd>()) / std::sqrt(2.0);
  });
  return xi;
}

FundamentalData fundamental_data(const ImmersedPatch& patch, const Field<Vec6c>& xi, const LabOptions& opts) {
  return fundamental_data(patch, tangent_data(patch, opts), xi, opts);
}

FundamentalData fundamental_data(const ImmersedPatch& patch, const TangentData& t, const Field<Vec6c>& xi,
                                 const LabOptions& opts) {
  const ProductModel& m = patch.model;
  FundamentalData d(patch.grid);
  const KahlerFunctions kf = kahler_functions(patch, t, opts);
  d.C1 = kf.C1;
  d.C2 = kf.C2;
  const Field<Vec6c> xi_x = d_dx(xi);
  const Field<Vec6c> xi_y = d_dy(xi);
  parallel_for(patch.grid.size(), [&](std::size_t k) {
    const Vec6& p = patch.points[k];
    auto G = [&](const Vec6c& a, const Vec6c& b) { return m.metric<cd>(p, a, b); };
    const Vec6c Fz = t.Fz(k);
    const Vec6c Fzz = t.Fzz(k);
    const Vec6c x = xi[k];
    const Vec6c xb = conj6(x);
    const Vec6c xb_z = 0.5 * (conj6(xi_x[k]) - I * conj6(xi_y[k])) + m.christoffel<cd>(p, Fz, xb);
    d.u[k] = 0.5 * std::log(t.E[k]);
    d.A[k] = -G(x, xb_z);
    d.f1[k] = G(Fzz, xb);
    d.f2[k] = G(Fzz, x);
    d.gamma1[k] = G(m.J<cd>(1, p, Fz), xb);
    d.gamma2[k] = G(m.J<cd>(2, p, Fz), x);
  });
  return d;
}

SecondFundamental second_fundamental(const ImmersedPatch& patch, const Field<Vec6c>& xi) {
  return second_fundamental(patch, tangent_data(patch), xi);
}

SecondFundamental second_fundamental(const ImmersedPatch& patch, const TangentData& t, const Field<Vec6c>& xi) {
  const GridSpec& g = patch.grid;
  const ProductModel& m = patch.model;
  SecondFundamental s{Field<Vec6>(g), Field<Vec6>(g), Field<Vec6>(g), Field<Vec6>(g), ScalarField(g), ScalarField(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec6& p = patch.points[k];
    auto G = [&](const Vec6& a, const Vec6& b) { return m.metric<double>(p, a, b); };
    const Vec6 N = std::sqrt(2.0) * xi[k].real();
    const Vec6 Nb = -std::sqrt(2.0) * xi[k].imag();
    auto normal = [&](const Vec6& v) { return Vec6(G(v, N) * N + G(v, Nb) * Nb); };
    s.hxx[k] = normal(t.Dxx[k]);
    s.hxy[k] = normal(t.Dxy[k]);
    s.hyy[k] = normal(t.Dyy[k]);
    const double E = t.E[k];
    s.H[k] = (s.hxx[k] + s.hyy[k]) / (2.0 * E);
    s.h_norm2[k] = (G(s.hxx[k], s.hxx[k]) + 2.0 * G(s.hxy[k], s.hxy[k]) + G(s.hyy[k], s.hyy[k])) / (E * E);
    s.H_norm[k] = std::sqrt(std::max(0.0, G(s.H[k], s.H[k])));
    s.max_H = std::max(s.max_H, s.H_norm[k]);
  }
  return s;
}

CurvatureReport curvature_report(const FundamentalData& d, const ScalarField& K1, const ScalarField& K2,
                                 const SecondFundamental* second, const LabOptions& opts) {
  const GridSpec& g = d.grid;
  CurvatureReport r;
  r.K = laplacian4(d.u);
  r.K_formula = ScalarField(g);
  r.Kperp = ScalarField(g);
  r.M1 = ScalarField(g);
  r.M2 = ScalarField(g);
  r.K1 = K1;
  r.K2 = K2;
  r.residual = ScalarField(g);
  r.gauss_equation_mode = second != nullptr && second->max_H > opts.minimal_tol;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double E = std::exp(2.0 * d.u[k]);
    const double c1 = d.C1[k], c2 = d.C2[k];
    const double jac1 = 0.5 * (c1 - c2), jac2 = 0.5 * (c1 + c2);
    const double n1 = std::norm(d.f1[k]), n2 = std::norm(d.f2[k]);
    r.K[k] *= -1.0 / E;
    r.M1[k] = jac1 * K1[k] + jac2 * K2[k];
    r.M2[k] = -jac1 * K1[k] + jac2 * K2[k];
    r.Kperp[k] = -4.0 / (E * E) * (n1 - n2) + 0.25 * (K1[k] + K2[k]) * (c1 * c1 - c2 * c2);
    const double ambient = K1[k] * jac1 * jac1 + K2[k] * jac2 * jac2;
    if (r.gauss_equation_mode) {
      const double H = second->H_norm[k];
      r.K_formula[k] = ambient + 2.0 * H * H - 0.5 * second->h_norm2[k];
    } else {
      r.K_formula[k] = -4.0 / (E * E) * (n1 + n2) + ambient;
    }
    r.residual[k] = std::abs(r.K[k] - r.K_formula[k]);
  }
  return r;
}

const ResidualStat& IdentityReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no identity named " + name);
}

double IdentityReport::worst() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.max);
  return w;
}

namespace {

ResidualStat make_stat(std::string name, ScalarField residual, const std::vector<bool>& band) {
  ResidualStat s;
  s.name = std::move(name);
  double sum = 0.0;
  for (std::size_t k = 0; k < residual.size(); ++k) {
    if (band[k]) {
      residual[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double v = residual[k];
    if (std::isnan(v)) {
      ++s.skipped;
      continue;
    }
    ++s.count;
    sum += v;
    s.max = std::max(s.max, v);
  }
  s.mean = s.count ? sum / static_cast<double>(s.count) : 0.0;
  s.grid = std::move(residual);
  return s;
}

// Nodes within stencil reach (5 along each axis) of a flagged node.
std::vector<bool> dilate(const GridSpec& g, const std::vector<bool>& flags, int reach) {
  std::vector<bool> out(flags.size(), false);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!flags[g.index(i, j)]) continue;
      for (int o = -reach; o <= reach; ++o) {
        int ii = i + o, jj = j + o;
        if (g.periodic_x) ii = (ii % g.nx + g.nx) % g.nx;
        if (g.periodic_y) jj = (jj % g.ny + g.ny) % g.ny;
        if (ii >= 0 && ii < g.nx) out[g.index(ii, j)] = true;
        if (jj >= 0 && jj < g.ny) out[g.index(i, jj)] = true;
      }
    }
  return out;
}

}  // namespace

IdentityReport identity_suite(const FundamentalData& d, const CurvatureReport& r, const LabOptions& opts) {
  const GridSpec& g = d.grid;
  const std::size_t n = g.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  IdentityReport rep;

  const ScalarField* C[2] = {&d.C1, &d.C2};
  const ComplexField* gam[2] = {&d.gamma1, &d.gamma2};
  const ComplexField* f[2] = {&d.f1, &d.f2};
  const ScalarField* M[2] = {&r.M1, &r.M2};

  ScalarField E(g);
  for (std::size_t k = 0; k < n; ++k) E[k] = std::exp(2.0 * d.u[k]);
  const ComplexField u_z = complex_derivatives(d.u).first;

  std::vector<bool> band(n, false);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int m = opts.boundary_margin;
      const bool bx = !g.periodic_x && (i < m || i >= g.nx - m);
      const bool by = !g.periodic_y && (j < m || j >= g.ny - m);
      band[g.index(i, j)] = bx || by;
      if (bx || by) ++rep.boundary_nodes;
    }
  auto stat = [&](std::string name, const ScalarField& res) { return make_stat(std::move(name), res, band); };

  std::vector<bool> near[2];
  for (int c = 0; c < 2; ++c) {
    near[c].assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
      near[c][k] = 1.0 - (*C[c])[k] * (*C[c])[k] < opts.complex_eps;
      if (near[c][k]) ++rep.complex_nodes;
    }
  }

  for (int c = 0; c < 2; ++c) {
    const std::string idx = std::to_string(c + 1);
    const double s = c == 0 ? 1.0 : -1.0;   // (−1)^{k+1}
    const double sj = c == 0 ? -1.0 : 1.0;  // (−1)^j
    const ScalarField& Cc = *C[c];
    const ComplexField& gc = *gam[c];
    const ComplexField& fc = *f[c];
    const ScalarField& Mc = *M[c];

    const ComplexField C_z = complex_derivatives(Cc).first;
    const auto [g_z, g_zb] = complex_derivatives(gc);
    const ComplexField f_zb = complex_derivatives(fc).second;
    const ScalarField lapC = laplacian4(Cc);

    ScalarField gam_norm(g), cz(g), gzb(g), fzb(g), aexpr(g), grad(g), lap(g), fnorm(g);
    for (std::size_t k = 0; k < n; ++k) {
      const double e = E[k], cc = Cc[k];
      const double K = r.K[k], Kp = r.Kperp[k], m = Mc[k];
      const cd Ab = std::conj(d.A[k]);
      gam_norm[k] = std::abs(std::norm(gc[k]) - 0.5 * e * (1.0 - cc * cc));
      cz[k] = std::abs(C_z[k] - 2.0 * I / e * std::conj(gc[k]) * fc[k]);
      gzb[k] = std::abs(g_zb[k] - s * Ab * gc[k]);
      fzb[k] = std::abs(f_zb[k] - (s * Ab * fc[k] + I * e * gc[k] * m / 4.0));
      if (near[c][k]) {
        aexpr[k] = nan;
      } else {
        const cd sign_c = c == 0 ? cd(1.0) : cd(-1.0);
        const cd expr = sign_c * (2.0 * u_z[k] - (2.0 * I * cc * fc[k] + g_z[k]) / gc[k]);
        aexpr[k] = std::abs(d.A[k] - expr);
      }
      grad[k] = std::abs(4.0 / e * std::norm(C_z[k]) - (1.0 - cc * cc) * (-K + sj * Kp + cc * m));
      lap[k] = std::abs(lapC[k] / e - (2.0 * cc * (K + s * Kp) - (1.0 + cc * cc) * m));
      fnorm[k] = std::abs(std::norm(fc[k]) - e * e / 8.0 * (-K + sj * Kp + cc * m));
    }
    rep.entries.push_back(stat("gamma_norm_" + idx, gam_norm));
    rep.entries.push_back(stat("C_z_" + idx, cz));
    rep.entries.push_back(stat("gamma_zbar_" + idx, gzb));
    rep.entries.push_back(stat("f_zbar_" + idx, fzb));
    rep.entries.push_back(stat("A_expression_" + idx, aexpr));
    rep.entries.push_back(stat("grad_C_" + idx, grad));
    rep.entries.push_back(stat("laplace_C_" + idx, lap));

    const std::vector<bool> skip = dilate(g, near[c], 5);
    for (int pm = 0; pm < 2; ++pm) {
      const double sg = pm == 0 ? 1.0 : -1.0;  // log(1 ± C)
      ScalarField lg(g);
      for (std::size_t k = 0; k < n; ++k) lg[k] = skip[k] ? 0.0 : std::log(1.0 + sg * Cc[k]);
      const ScalarField lap_lg = laplacian4(lg);
      ScalarField res(g);
      for (std::size_t k = 0; k < n; ++k)
        res[k] = skip[k] ? nan
                         : std::abs(lap_lg[k] / E[k] - (-sg * Mc[k] + r.K[k] + s * r.Kperp[k]));
      rep.entries.push_back(stat(std::string("laplace_log_") + (pm == 0 ? "plus_" : "minus_") + idx, res));
    }
    rep.entries.push_back(stat("f_norm_" + idx, fnorm));
  }
  rep.entries.push_back(stat("gauss_curvature", r.residual));
  return rep;
}

std::string label_names(unsigned mask) {
  if (mask == kGeneric) return "generic";
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (!(mask & bit)) return;
    if (!out.empty()) out += ' ';
    out += name;
  };
  add(kComplexJ1, "complex-J1");
  add(kComplexJ2, "complex-J2");
  add(kLagrangianO1, "lagrangian-O1");
  add(kLagrangianO2, "lagrangian-O2");
  return out;
}

std::string Classification::summary() const { return label_names(common); }

Classification classify(const FundamentalData& d, const LabOptions& opts) {
  Classification c;
  c.labels = Field<unsigned>(d.grid, 0u);
  c.common = kComplexJ1 | kComplexJ2 | kLagrangianO1 | kLagrangianO2;
  for (std::size_t k = 0; k < d.grid.size(); ++k) {
    unsigned l = 0;
    if (1.0 - d.C1[k] * d.C1[k] < opts.complex_eps) l |= kComplexJ1;
    if (1.0 - d.C2[k] * d.C2[k] < opts.complex_eps) l |= kComplexJ2;
    if (std::abs(d.C1[k]) < opts.lagrangian_eps) l |= kLagrangianO1;
    if (std::abs(d.C2[k]) < opts.lagrangian_eps) l |= kLagrangianO2;
    c.labels[k] = l;
    c.common &= l;
  }
  if (d.grid.size() == 0) c.common = 0;
  return c;
}

Analysis analyze(const ImmersedPatch& patch, const LabOptions& opts) {
  Analysis a;
  a.tangent = tangent_data(patch, opts);
  a.kahler = kahler_functions(patch, a.tangent, opts);
  a.xi = normal_frame(patch, a.tangent);
  a.data = fundamental_data(patch, a.tangent, a.xi, opts);
  a.second = second_fundamental(patch, a.tangent, a.xi);
  a.curvature = curvature_report(a.data, a.tangent.K1, a.tangent.K2, &a.second, opts);
  a.identities = identity_suite(a.data, a.curvature, opts);
  a.classification = classify(a.data, opts);
  return a;
}

ImmersedPatch reflect_orientation(const ImmersedPatch& patch) {
  const GridSpec& g = patch.grid;
  GridSpec r = g;
  r.y0 = g.periodic_y ? -g.y0 : -(g.y0 + (g.ny - 1) * g.h);
  ImmersedPatch out(r, patch.model);
  for (int j = 0; j < g.ny; ++j) {
    const int src = g.periodic_y ? (g.ny - j) % g.ny : g.ny - 1 - j;
    for (int i = 0; i < g.nx; ++i) out.points(i, j) = patch.points(i, src);
  }
  return out;
}

Field<Vec6c> regauge(const Field<Vec6c>& xi, const ScalarField& theta) {
  if (xi.grid != theta.grid) throw std::invalid_argument("gauge angle and frame on different grids");
  Field<Vec6c> out(xi.grid);
  for (std::size_t k = 0; k < xi.size(); ++k) out[k] = std::polar(1.0, theta[k]) * xi[k];
  return out;
}

}  // namespace prodsurf
