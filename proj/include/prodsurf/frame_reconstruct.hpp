#pragma once

#include <optional>
#include <string>

#include "prodsurf/immersion_lab.hpp"
#include "prodsurf/sinh_gordon.hpp"

namespace prodsurf {

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fundamental data of the minimal immersion built from two sinh-Gordon
/// solutions X1, X2 and a family parameter t.
struct Theorem2Data {
  ScalarField X1, X2;
  double t = 0.0;
  FundamentalData data;
  ComplexField u_z;
  ScalarField E;  ///< e^{2u} = 4 cosh(X1+X2) cosh(X1−X2)
};

/// Throws std::invalid_argument on grid mismatch.
Theorem2Data build_data(const ScalarField& X1, const ScalarField& X2, double t);

/// Curvature report of Theorem-2 data in S²×S² (K₁ = K₂ = 1).
CurvatureReport theorem2_curvature(const Theorem2Data& data, const LabOptions& opts = {});
IdentityReport theorem2_identities(const Theorem2Data& data, const LabOptions& opts = {});

/// Two sinh-Gordon solutions on the Dirichlet square [0, L]² with n×n nodes,
/// solved with the compact scheme from travelling-wave boundary data.
struct SolverPair {
  ScalarField X1, X2;
  int iterations = 0;
  double residual = 0.0;
};

SolverPair solver_pair(int n, double L = 1.5, Scheme scheme = Scheme::compact);

/// Point, tangent and complex normal of the immersion in R³×R³; the real
/// point Φ is kept complex for uniform arithmetic.
struct FrameState {
  Vec6c Phi;
  Vec6c Phi_z;
  Vec6c xi;
};

/// ⟨⟨a,b⟩⟩: complex-bilinear Euclidean pairing (R³×R³ or one factor).
template <class A, class B>
cd pairing(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a.transpose() * b).value();
}
/// Φ̂ = (Φ₁, −Φ₂).
inline Vec6c hat(const Vec6c& v) {
  Vec6c out = v;
  out.tail<3>() *= -1.0;
  return out;
}

struct FrameResiduals {
  double quadric = 0.0;  ///< max over factors of |⟨Φᵢ,Φᵢ⟩ − 1|
  double algebraic = 0.0;  ///< worst of the pairing invariants
  double j_relations = 0.0;
};

FrameResiduals frame_residuals(const FrameState& s, double E, double C1, double C2, cd gamma1, cd gamma2);

/// Frame at `node` with Φ(node) = base. Tangent directions come from the
/// embedded sphere's reference axes. Throws ReconstructionError at complex
/// points or if the constructed frame violates its constraints by > 1e−8.
FrameState initial_frame(const Theorem2Data& data, std::pair<int, int> node = {0, 0},
                         std::optional<std::pair<Vec3, Vec3>> base = std::nullopt);

enum class IntegrationOrder { x_then_y, y_then_x };

struct IntegrateOptions {
  std::pair<int, int> base_node{0, 0};
  std::optional<std::pair<Vec3, Vec3>> base_point;
  IntegrationOrder order = IntegrationOrder::x_then_y;
  double drift_bound = 1e-3;  ///< abort when any invariant drifts beyond this
  bool renormalize = false;   ///< project each factor back to its sphere after every step
};

struct DriftReport {
  double quadric = 0.0;
  double algebraic = 0.0;
  double j_relations = 0.0;
  std::size_t renormalized_steps = 0;
  /// Worst period-closing gap along x (−1 for non-periodic data). The
  /// output grid is never periodic: a gap of 1e−7 already costs more in
  /// wrapped stencils than one-sided stencils do.
  double closure_x = -1.0;
  double closure_y = -1.0;
  double step_scale = 0.0;  ///< h · max coefficient size; > 0.5 means under-resolved
  bool under_resolved = false;
};

struct Reconstruction {
  ImmersedPatch patch;
  Field<Vec6c> Phi_z;
  Field<Vec6c> xi;
  Field<unsigned char> filled;  ///< nodes reached before an abort
  DriftReport drift;
  bool aborted = false;
  std::string message;
};

/// Integrates the extended Frenet system with RK4: the base row in x, then
/// every column in y (or the transpose for y_then_x). Coefficients at half
/// steps come from 4-point cubic interpolation along the line.
Reconstruction integrate(const Theorem2Data& data, const IntegrateOptions& opts = {});

struct ValidationReport {
  double quadric = 0.0;
  double metric_state = 0.0;    ///< max |2⟨⟨Φ_z,Φ̄_z⟩⟩ − e^{2u}| from the integrated frame
  double metric_stencil = 0.0;  ///< same from stencil derivatives of the surface
  double kahler_state = 0.0;    ///< max |Cₖ − tanh| with Cₖ from the frame
  double kahler_stencil = 0.0;  ///< same through the immersion lab
  std::string error;            ///< analysis failure, if any
};

ValidationReport validate(const Reconstruction& rec, const Theorem2Data& data);

struct FamilyComparison {
  double metric_difference = 0.0;  ///< max pointwise difference of the frame metrics
  double max_distance = 0.0;       ///< max |Φ_t − Φ_t'|
};

FamilyComparison compare_family(const Reconstruction& a, const Reconstruction& b);

/// max |Φ_a − Φ_b| over nodes filled in both.
double max_point_distance(const Reconstruction& a, const Reconstruction& b);

}  // namespace prodsurf
