#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prodsurf/factor.hpp"

namespace prodsurf {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateFaceError : public MeshError {
 public:
  DegenerateFaceError(std::size_t face, const std::string& what) : MeshError(what), face_(face) {}
  std::size_t face() const { return face_; }

 private:
  std::size_t face_;
};

/// Isometry of the product acting factorwise on ambient coordinates.
struct DeckGenerator {
  Mat3 first = Mat3::Identity();
  Mat3 second = Mat3::Identity();
};

/// Triangulated closed surface in Σ₁×Σ₂, each factor embedded as a quadric in
/// R³ (unit sphere, hyperboloid sheet or plane). Vertices are stored as
/// (x₁, x₂) ∈ R³×R³.
///
/// A mesh may live in a quotient by up to two commuting deck generators. Each
/// face corner then carries exponents (a, b) and the corner position is
/// G₀^a G₁^b applied to the stored vertex. Faces without shifts use (0, 0).
struct TriMesh {
  using Face = std::array<int, 3>;
  using Shift = std::array<int, 2>;

  std::array<FactorKind, 2> factors{FactorKind::sphere, FactorKind::sphere};
  std::vector<Vec6> vertices;
  std::vector<Face> faces;
  std::vector<DeckGenerator> decks;
  std::vector<std::array<Shift, 3>> shifts;  // empty, or one entry per face

  bool has_shifts() const { return !shifts.empty(); }
  Eigen::Matrix<double, 6, 6> corner_map(std::size_t face, int corner) const;
  Vec6 corner(std::size_t face, int corner) const;
};

/// Throws MeshError unless the mesh is a valid closed, consistently oriented
/// surface with every vertex on its quadrics to `quadric_tol`.
void validate_mesh(const TriMesh& mesh, double quadric_tol = 1e-10);

double quadric_violation(const TriMesh& mesh);

/// Gram data of a face: edge vectors a = P1 − P0, b = P2 − P0 under the
/// product inner product. Hyperbolic factor components are first projected to
/// the tangent plane at the normalized barycenter.
struct FaceGram {
  double aa = 0, bb = 0, ab = 0;
  double area() const;
};

FaceGram face_gram(const TriMesh& mesh, std::size_t face);
double face_area(const TriMesh& mesh, std::size_t face);
double area(const TriMesh& mesh);

/// Gradient of area(mesh) at every vertex.
struct AreaGradient {
  /// ∂A/∂x in ambient coordinates (plain partial derivatives).
  std::vector<Vec6> partial;
  /// Riemannian gradient in the product tangent space at each vertex.
  std::vector<Vec6> tangent;
  /// Pointwise norm of `tangent` under the product metric.
  std::vector<double> norm;
  double sup_norm() const;
};

AreaGradient area_gradient(const TriMesh& mesh);

/// Directional derivative of the area along an ambient displacement field.
double directional_derivative(const AreaGradient& g, const std::vector<Vec6>& direction);

/// Orthonormal basis (e₁, je₁, e₂, je₂) of the product tangent space at v.
Eigen::Matrix<double, 6, 4> tangent_frame(const TriMesh& mesh, const Vec6& v);

/// Component of each vertex gradient normal to the discrete tangent plane.
/// The tangent plane at a vertex is the dominant 2-plane of its one-ring edge
/// vectors projected to the product tangent space.
std::vector<Vec6> normal_gradient(const TriMesh& mesh, const AreaGradient& g);

/// Factorwise retraction to the quadrics.
Vec6 retract(const TriMesh& mesh, const Vec6& x);

/// Per-face discrete Kähler functions Ωₖ(a,b)/area with a, b projected to the
/// tangent planes at the barycenter.
struct FaceKahler {
  double C1 = 0, C2 = 0;
};
std::vector<FaceKahler> kahler_measure(const TriMesh& mesh);

struct KahlerSummary {
  double mean_abs_C1 = 0, mean_abs_C2 = 0;
  double min_C1 = 0, max_C1 = 0, min_C2 = 0, max_C2 = 0;
};
KahlerSummary summarize(const std::vector<FaceKahler>& c);

struct EulerReport {
  int V = 0, E = 0, F = 0;
  int chi = 0;
  /// Σ(2π − vertex angle sum)/2π from the face Gram angles.
  double defect_chi = 0;
};
std::vector<double> angle_defects(const TriMesh& mesh);
EulerReport euler_characteristic(const TriMesh& mesh);

struct EdgeStats {
  double min = 0, mean = 0, max = 0;
};
EdgeStats edge_lengths(const TriMesh& mesh);
/// Smallest inradius/circumradius ratio over faces (equilateral: 0.5).
double min_face_quality(const TriMesh& mesh);

enum class StepPolicy { fixed, backtracking };
enum class GradientProjection { normal, full };

struct FlowConfig {
  StepPolicy step = StepPolicy::backtracking;
  GradientProjection projection = GradientProjection::normal;
  double step_size = 1e-2;  // fixed step, or first trial step for backtracking
  double grad_tol = 1e-8;
  int max_iters = 20000;
  double armijo = 1e-4;
  double min_step = 1e-18;
  /// Relative to the initial mean edge length.
  double min_edge_ratio = 1e-4;
  double min_quality = 1e-3;
  void validate() const;
};

enum class FlowStatus { converged, max_iters, degenerated, line_search_failed };
std::string to_string(FlowStatus s);

struct FlowSample {
  int iteration = 0;
  double area = 0;
  double grad_norm = 0;       // sup norm of the descent gradient
  double full_grad_norm = 0;  // sup norm of the full tangent gradient
  double min_edge = 0;
  double min_quality = 0;
  double mean_abs_C1 = 0, mean_abs_C2 = 0;
  double step = 0;
};

struct FlowReport {
  FlowStatus status = FlowStatus::max_iters;
  std::vector<FlowSample> trajectory;
  std::vector<std::string> notes;
  double max_quadric_violation = 0;
  bool area_monotone = true;
  int iterations() const { return trajectory.empty() ? 0 : trajectory.back().iteration; }
};

struct FlowResult {
  TriMesh mesh;
  FlowReport report;
};

FlowResult flow(TriMesh mesh, const FlowConfig& cfg);

void write_trajectory_csv(std::ostream& out, const FlowReport& report);

// Test meshes.

/// Outward-oriented subdivided icosahedron on the unit sphere.
TriMesh icosphere(int subdivisions);
/// S²×{q} with q = (0,0,1).
TriMesh slice_icosphere(int subdivisions);
/// v ↦ (v, v) in S²×S².
TriMesh diagonal_icosphere(int subdivisions);
/// Product of two great circles in S²×S², n₁×n₂ vertices.
TriMesh great_circle_torus(int n1, int n2);
/// Product of two closed geodesics of lengths l₁, l₂ in quotients of H²×H² by
/// boosts. Needs n ≥ 3 in each direction.
TriMesh geodesic_torus_h2(int n1, int n2, double l1, double l2);
/// Immersed sphere v ↦ (lift(s·(v₀,v₁)), lift(s·(v₁,v₂))) in H²×H².
TriMesh hyperbolic_icosphere(int subdivisions, double scale);
/// Random tangent displacement of every vertex with the given amplitude,
/// followed by retraction.
TriMesh perturb(const TriMesh& mesh, double amplitude, std::uint64_t seed);

/// Boost by distance d along the x₁ axis of the hyperboloid.
Mat3 boost(double d);

}  // namespace prodsurf
