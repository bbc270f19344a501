#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "prodsurf/discrete_minimizer.hpp"
#include "prodsurf/parallel.hpp"

using namespace prodsurf;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<Vec6> random_tangent_field(const TriMesh& m, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  std::vector<Vec6> d;
  for (const Vec6& v : m.vertices) {
    Eigen::Vector4d w;
    for (int i = 0; i < 4; ++i) w(i) = n(rng);
    d.push_back(tangent_frame(m, v) * w);
  }
  double n2 = 0;
  for (const Vec6& v : d) n2 += v.squaredNorm();
  for (Vec6& v : d) v /= std::sqrt(n2);  // unit direction in configuration space
  return d;
}

TriMesh displaced(TriMesh m, const std::vector<Vec6>& d, double eps) {
  for (std::size_t i = 0; i < d.size(); ++i) m.vertices[i] += eps * d[i];
  return m;
}

}  // namespace

TEST_CASE("areas of reference meshes") {
  CHECK(area(slice_icosphere(4)) == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(area(great_circle_torus(64, 64)) == doctest::Approx(4 * pi * pi).epsilon(0.01));
  CHECK(area(geodesic_torus_h2(32, 32, 1.0, 1.5)) == doctest::Approx(1.5).epsilon(0.01));

  TriMesh bad = icosphere(1);
  bad.vertices[bad.faces[7][1]] = bad.vertices[bad.faces[7][0]];
  try {
    (void)area(bad);
    FAIL("expected a degenerate face");
  } catch (const DegenerateFaceError& e) {
    CHECK(std::string(e.what()).find("face") != std::string::npos);
    CHECK(bad.faces[e.face()].size() == 3);
  }
}

TEST_CASE("mesh validation") {
  CHECK_NOTHROW(validate_mesh(icosphere(2)));
  CHECK_NOTHROW(validate_mesh(geodesic_torus_h2(4, 5, 1, 1)));
  TriMesh open = icosphere(1);
  open.faces.pop_back();
  CHECK_THROWS_AS(validate_mesh(open), MeshError);
  TriMesh flipped = icosphere(1);
  std::swap(flipped.faces[3][1], flipped.faces[3][2]);
  CHECK_THROWS_AS(validate_mesh(flipped), MeshError);
  TriMesh off = icosphere(1);
  off.vertices[2] *= 1.001;
  CHECK_THROWS_AS(validate_mesh(off), MeshError);
  CHECK_THROWS_AS(great_circle_torus(2, 5), std::invalid_argument);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(20261015);
  const std::vector<TriMesh> meshes = {perturb(slice_icosphere(2), 1e-2, 1),
                                       perturb(geodesic_torus_h2(8, 8, 1.0, 1.3), 1e-2, 2),
                                       perturb(hyperbolic_icosphere(2, 0.8), 1e-2, 3)};
  const double eps = 1e-5;
  double worst = 0;
  for (const TriMesh& m : meshes) {
    const AreaGradient g = area_gradient(m);
    for (int k = 0; k < 20; ++k) {
      const auto d = random_tangent_field(m, rng);
      const double an = directional_derivative(g, d);
      const double fd = (area(displaced(m, d, eps)) - area(displaced(m, d, -eps))) / (2 * eps);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("stationary meshes") {
  CHECK(area_gradient(great_circle_torus(24, 24)).sup_norm() <= 1e-8);
  CHECK(area_gradient(geodesic_torus_h2(12, 12, 1.0, 1.0)).sup_norm() <= 1e-8);
  const TriMesh s = slice_icosphere(3);
  const AreaGradient g = area_gradient(s);
  double normal = 0;
  for (const Vec6& v : normal_gradient(s, g)) normal = std::max(normal, v.norm());
  CHECK(normal <= 1e-8);
  // Chordal area still sees tangential sliding inside the sphere.
  CHECK(g.sup_norm() > 1e-6);
}

TEST_CASE("perturbed slice: descent decreases area") {
  const TriMesh m = perturb(slice_icosphere(2), 1e-3, 11);
  const AreaGradient g = area_gradient(m);
  const auto n = normal_gradient(m, g);
  double nn = 0;
  for (const Vec6& v : n) nn = std::max(nn, v.norm());
  CHECK(nn > 1e-6);
  TriMesh step = m;
  for (std::size_t i = 0; i < n.size(); ++i) step.vertices[i] = retract(m, m.vertices[i] - 1e-2 * n[i]);
  CHECK(area(step) < area(m));
}

TEST_CASE("Kahler measure") {
  const KahlerSummary s = summarize(kahler_measure(slice_icosphere(3)));
  CHECK(s.min_C1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.max_C1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.min_C2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.max_C2 == doctest::Approx(-1.0).epsilon(1e-12));
  const KahlerSummary t = summarize(kahler_measure(great_circle_torus(16, 16)));
  CHECK(t.mean_abs_C1 < 1e-14);
  CHECK(t.mean_abs_C2 < 1e-14);
  const KahlerSummary d = summarize(kahler_measure(diagonal_icosphere(3)));
  CHECK(d.min_C1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(d.max_C2) < 1e-12);
  for (const FaceKahler& c : kahler_measure(perturb(diagonal_icosphere(2), 0.05, 5))) {
    CHECK(std::abs(c.C1) <= 1 + 1e-12);
    CHECK(std::abs(c.C2) <= 1 + 1e-12);
  }
}

TEST_CASE("Euler characteristic and angle defects") {
  const EulerReport s = euler_characteristic(icosphere(3));
  CHECK(s.chi == 2);
  CHECK(std::abs(2 * pi * s.defect_chi - 4 * pi) <= 1e-10);
  const EulerReport t = euler_characteristic(great_circle_torus(10, 12));
  CHECK(t.chi == 0);
  CHECK(std::abs(t.defect_chi) <= 1e-9);
  const EulerReport h = euler_characteristic(perturb(geodesic_torus_h2(6, 7, 1, 1), 0.05, 9));
  CHECK(h.chi == 0);
  CHECK(std::abs(h.defect_chi) <= 1e-9);
  TriMesh open = icosphere(0);
  open.faces.pop_back();
  CHECK_THROWS_AS(euler_characteristic(open), MeshError);
}

TEST_CASE("flow outcomes") {
  FlowConfig cfg;
  const FlowResult s = flow(slice_icosphere(3), cfg);
  CHECK(s.report.status == FlowStatus::converged);
  CHECK(s.report.iterations() == 0);

  FlowConfig full;
  full.projection = GradientProjection::full;
  full.grad_tol = 1e-6;
  const FlowResult t = flow(perturb(geodesic_torus_h2(12, 12, 1.0, 1.2), 1e-2, 4), full);
  CHECK(t.report.status == FlowStatus::converged);
  CHECK(t.report.area_monotone);
  CHECK(t.report.max_quadric_violation <= 1e-12);
  CHECK(t.report.trajectory.front().mean_abs_C1 > 1e-3);
  CHECK(t.report.trajectory.back().mean_abs_C1 <= 0.05);
  CHECK(t.report.notes.size() == 1);

  const FlowResult h = flow(hyperbolic_icosphere(2, 1.0), cfg);
  CHECK(h.report.status == FlowStatus::degenerated);
  CHECK(h.report.area_monotone);
  const auto& tr = h.report.trajectory;
  for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k].area < tr[k - 1].area);

  FlowConfig fixed;
  fixed.step = StepPolicy::fixed;
  fixed.step_size = 0.05;
  fixed.max_iters = 5;
  const FlowResult f = flow(perturb(slice_icosphere(1), 1e-2, 3), fixed);
  CHECK(f.report.status == FlowStatus::max_iters);
  CHECK(f.report.trajectory.size() == 6);

  FlowConfig broken;
  broken.grad_tol = 0;
  CHECK_THROWS_AS(flow(slice_icosphere(1), broken), std::invalid_argument);
}

TEST_CASE("trajectory CSV") {
  FlowConfig cfg;
  cfg.max_iters = 3;
  cfg.grad_tol = 1e-14;
  const FlowResult r = flow(perturb(slice_icosphere(1), 1e-2, 8), cfg);
  std::ostringstream os;
  write_trajectory_csv(os, r.report);
  const std::string csv = os.str();
  CHECK(csv.rfind("iteration,area,grad_norm,full_grad_norm,min_edge,min_quality,mean_abs_C1,mean_abs_C2,step\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(r.report.trajectory.size()));
}

TEST_CASE("gradient does not depend on the thread count") {
  const TriMesh m = perturb(geodesic_torus_h2(10, 10, 1, 1), 1e-2, 6);
  set_thread_count(1);
  const AreaGradient a = area_gradient(m);
  set_thread_count(4);
  const AreaGradient b = area_gradient(m);
  set_thread_count(1);
  for (std::size_t i = 0; i < a.partial.size(); ++i) CHECK(a.partial[i] == b.partial[i]);
}
