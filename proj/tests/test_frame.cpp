#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <Eigen/Geometry>

#include "prodsurf/frame_reconstruct.hpp"

using namespace prodsurf;

namespace {

Theorem2Data flat_data(int n, double t) {
  const ScalarField zero(torus_grid(n), 0.0);
  return build_data(zero, zero, t);
}

double max_drift(const Reconstruction& r) { return std::max({r.drift.quadric, r.drift.algebraic, r.drift.j_relations}); }

// Stencil Φ_zz̄ against −(e^{2u}/4)Φ + (C₁C₂e^{2u}/4)Φ̂ away from the edges.
double frenet22_residual(const Reconstruction& rec, const Theorem2Data& d) {
  const Field<Vec6> lap = laplacian4(rec.patch.points);
  const GridSpec& g = rec.patch.grid;
  double m = 0.0;
  for (int j = 4; j < g.ny - 4; ++j)
    for (int i = 4; i < g.nx - 4; ++i) {
      const std::size_t k = g.index(i, j);
      const Vec6 Phi = rec.patch.points[k];
      Vec6 Ph = Phi;
      Ph.tail<3>() *= -1.0;
      const double E = d.E[k];
      const Vec6 target = -0.25 * E * Phi + 0.25 * d.data.C1[k] * d.data.C2[k] * E * Ph;
      m = std::max(m, (0.25 * lap[k] - target).norm());
    }
  return m;
}

}  // namespace

TEST_CASE("flat Theorem-2 data") {
  const Theorem2Data d = flat_data(16, 0.0);
  for (std::size_t k = 0; k < d.E.size(); ++k) {
    CHECK(d.data.C1[k] == 0.0);
    CHECK(d.data.C2[k] == 0.0);
    CHECK(d.E[k] == doctest::Approx(4.0));
    CHECK(std::abs(d.data.gamma1[k] - cd(std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(d.data.gamma2[k] - cd(std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(d.data.A[k]) == 0.0);
    CHECK(std::abs(d.data.f1[k]) == 0.0);
    CHECK(std::abs(d.data.f2[k]) == 0.0);
  }
  const double t = 1.3;
  const Theorem2Data dt = flat_data(16, t);
  const cd expect = std::sqrt(2.0) * std::exp(cd(0, t / 2));
  CHECK(std::abs(dt.data.gamma1[5] - expect) < 1e-15);
  CHECK(std::abs(dt.data.gamma2[5] - expect) < 1e-15);
  CHECK(std::norm(dt.data.gamma1[5]) == doctest::Approx(2.0));
}

TEST_CASE("build_data invariants on solver output") {
  const SolverPair sp = solver_pair(24);
  const Theorem2Data a = build_data(sp.X1, sp.X2, 0.0), b = build_data(sp.X1, sp.X2, 2.0);
  for (std::size_t k = 0; k < a.E.size(); ++k) {
    const double x1 = sp.X1[k], x2 = sp.X2[k];
    CHECK(a.data.C1[k] == std::tanh(x1 - x2));
    CHECK(a.data.C2[k] == std::tanh(x1 + x2));
    CHECK(a.E[k] == 4.0 * std::cosh(x1 + x2) * std::cosh(x1 - x2));
    for (int c = 0; c < 2; ++c) {
      const double C = c == 0 ? a.data.C1[k] : a.data.C2[k];
      const cd gam = c == 0 ? a.data.gamma1[k] : a.data.gamma2[k];
      CHECK(std::abs(std::norm(gam) - 0.5 * a.E[k] * (1 - C * C)) < 1e-12);
    }
    // t only rotates phases.
    CHECK(a.data.u[k] == b.data.u[k]);
    CHECK(a.data.C1[k] == b.data.C1[k]);
    CHECK(std::abs(b.data.gamma1[k] - a.data.gamma1[k] * std::exp(cd(0, 1.0))) < 1e-14);
    CHECK(std::abs(b.data.gamma2[k] - a.data.gamma2[k] * std::exp(cd(0, 1.0))) < 1e-14);
  }
  ScalarField other(torus_grid(8), 0.0);
  CHECK_THROWS_AS(build_data(sp.X1, other, 0.0), std::invalid_argument);
}

TEST_CASE("initial frame") {
  const Theorem2Data d = flat_data(16, 0.0);
  const FrameState s = initial_frame(d, {0, 0}, std::pair{Vec3(1, 0, 0), Vec3(1, 0, 0)});
  CHECK(std::abs(pairing(s.Phi_z.head<3>(), s.Phi_z.head<3>().conjugate()) - 1.0) < 1e-14);
  CHECK(std::abs(pairing(s.Phi_z.tail<3>(), s.Phi_z.tail<3>().conjugate()) - 1.0) < 1e-14);
  CHECK(std::abs(s.Phi_z(0)) < 1e-15);
  CHECK(std::abs(s.Phi_z(3)) < 1e-15);

  const SolverPair sp = solver_pair(24);
  const Theorem2Data g = build_data(sp.X1, sp.X2, 0.9);
  for (std::pair<int, int> node : {std::pair{0, 0}, std::pair{7, 11}, std::pair{23, 23}}) {
    const std::size_t k = g.data.grid.index(node.first, node.second);
    const FrameState f = initial_frame(g, node, std::pair{Vec3(0.2, -0.5, 0.8), Vec3(-0.3, 0.1, 0.9)});
    const FrameResiduals r =
        frame_residuals(f, g.E[k], g.data.C1[k], g.data.C2[k], g.data.gamma1[k], g.data.gamma2[k]);
    CHECK(r.quadric <= 1e-12);
    CHECK(r.algebraic <= 1e-12);
    CHECK(r.j_relations <= 1e-10);
  }

  ScalarField big(torus_grid(8), 30.0), zero(torus_grid(8), 0.0);
  CHECK_THROWS_AS(initial_frame(build_data(big, zero, 0.0)), ReconstructionError);
  CHECK_THROWS_AS(initial_frame(d, {16, 0}), std::out_of_range);
}

TEST_CASE("flat case reconstructs the product of great circles") {
  const Theorem2Data d = flat_data(256, 0.0);
  const Vec3 p(1, 0, 0), q(1, 0, 0);
  const Reconstruction rec = integrate(d);
  REQUIRE(!rec.aborted);
  const FactorModel sphere = FactorModel::embedded(FactorKind::sphere);
  const Vec3 e1 = sphere.unit_tangent(p), f1 = sphere.unit_tangent(q);
  double err = 0.0;
  const GridSpec& g = rec.patch.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      Vec6 expect;
      expect << p * std::cos(2 * y) + p.cross(e1) * std::sin(2 * y), q * std::cos(2 * x) + f1 * std::sin(2 * x);
      err = std::max(err, (rec.patch.points(i, j) - expect).norm());
    }
  CHECK(err < 1e-6);
  const ValidationReport v = validate(rec, d);
  CHECK(v.quadric < 1e-6);
  CHECK(v.metric_state < 1e-6);
  CHECK(v.kahler_state < 1e-12);
  CHECK(v.error.empty());
  CHECK(rec.drift.closure_x < 1e-5);
  CHECK(!rec.drift.under_resolved);
}

TEST_CASE("frame drift converges at fourth order") {
  const double d64 = max_drift(integrate(flat_data(64, 0.4)));
  const double d128 = max_drift(integrate(flat_data(128, 0.4)));
  CHECK(std::log2(d64 / d128) > 3.8);
}

TEST_CASE("integration order does not matter") {
  IntegrateOptions xy, yx;
  yx.order = IntegrationOrder::y_then_x;
  const Theorem2Data flat = flat_data(64, 0.5);
  CHECK(max_point_distance(integrate(flat, xy), integrate(flat, yx)) < 1e-12);
  const SolverPair sp = solver_pair(64);
  const Theorem2Data d = build_data(sp.X1, sp.X2, 0.3);
  CHECK(max_point_distance(integrate(d, xy), integrate(d, yx)) < 1e-5);
}

TEST_CASE("re-analysis recovers the Kahler functions and the structure equation for Phi_zz̄") {
  double r64 = 0, r128 = 0;
  for (int n : {64, 128}) {
    const SolverPair sp = solver_pair(n);
    const Theorem2Data d = build_data(sp.X1, sp.X2, 1.1);
    const Reconstruction rec = integrate(d);
    LabOptions opts;
    opts.isothermal_tol = 1e-4;
    const KahlerFunctions kf = kahler_functions(rec.patch, opts);
    double e = 0;
    for (std::size_t k = 0; k < kf.C1.size(); ++k)
      e = std::max({e, std::abs(kf.C1[k] - d.data.C1[k]), std::abs(kf.C2[k] - d.data.C2[k])});
    CHECK(e < (n == 64 ? 2e-4 : 2e-5));
    (n == 64 ? r64 : r128) = frenet22_residual(rec, d);
  }
  CHECK(r128 < 1e-5);
  CHECK(std::log2(r64 / r128) >= 3.0);
}

TEST_CASE("full identity suite holds on a reconstructed surface") {
  // Guards the normal-frame gauge: a jump in ξ shows up in the γ, f and A
  // derivative identities long before anything gauge-invariant moves.
  const SolverPair sp = solver_pair(128);
  const Theorem2Data d = build_data(sp.X1, sp.X2, 0.7);
  LabOptions opts;
  opts.isothermal_tol = 1e-4;
  opts.boundary_margin = 8;
  ImmersedPatch patch = integrate(d).patch;
  // Rotating the first factor is an isometry. Sending the patch center to
  // the reference axis of the embedded sphere basis puts the axis switch
  // inside the patch.
  const Eigen::Vector3d axis(0.267261241912424, 0.534522483824849, 0.801783725737273);
  const std::size_t c = patch.grid.index(patch.grid.nx / 2 + 3, patch.grid.ny / 2 - 5);
  const Eigen::Matrix3d R =
      Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d(patch.points[c].head<3>()), axis).toRotationMatrix();
  for (Vec6& p : patch.points.values) p.head<3>() = R * p.head<3>();

  const Analysis a = analyze(patch, opts);
  CHECK(a.identities.worst() < 1e-4);
  for (const char* name : {"gamma_zbar_1", "gamma_zbar_2", "f_zbar_1", "f_zbar_2", "A_expression_1", "A_expression_2"})
    CHECK(a.identities.at(name).max < 1e-4);
}

TEST_CASE("drift bound aborts with partial output; renormalization is reported") {
  const SolverPair sp = solver_pair(32);
  const Theorem2Data d = build_data(sp.X1, sp.X2, 0.0);
  IntegrateOptions tight;
  tight.drift_bound = 1e-12;
  const Reconstruction rec = integrate(d, tight);
  CHECK(rec.aborted);
  CHECK(!rec.message.empty());
  CHECK(rec.filled(0, 0) == 1);
  CHECK(rec.filled(31, 31) == 0);
  CHECK(!validate(rec, d).error.empty());

  IntegrateOptions renorm;
  renorm.renormalize = true;
  const Reconstruction r2 = integrate(d, renorm);
  CHECK(r2.drift.quadric < 1e-14);
  CHECK(r2.drift.renormalized_steps > 0);
}

TEST_CASE("family members are isometric but distinct") {
  std::vector<Reconstruction> recs;
  for (double t : {0.0, M_PI / 4, M_PI / 2}) recs.push_back(integrate(flat_data(256, t)));
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const FamilyComparison c = compare_family(recs[a], recs[b]);
      CHECK(c.metric_difference < 1e-6);
      CHECK(c.max_distance > 1e-3);
    }
}
