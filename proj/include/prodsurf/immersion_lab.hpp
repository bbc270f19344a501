#pragma once

#include <string>
#include <vector>

#include "prodsurf/factor_model.hpp"
#include "prodsurf/grid.hpp"

namespace prodsurf {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec6c = Eigen::Matrix<cd, 6, 1>;

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Σ₁×Σ₂ acting on stacked 6-vectors (factor 1 in the head, factor 2 in the tail).
struct ProductModel {
  FactorModel first;
  FactorModel second;

  template <class S>
  S metric(const Vec6& p, const Eigen::Matrix<S, 6, 1>& X, const Eigen::Matrix<S, 6, 1>& Y) const {
    return first.metric<S>(p.head<3>(), X.template head<3>(), Y.template head<3>()) +
           second.metric<S>(p.tail<3>(), X.template tail<3>(), Y.template tail<3>());
  }

  /// J₁ = j₁⊕j₂, J₂ = −j₁⊕j₂.
  template <class S>
  Eigen::Matrix<S, 6, 1> J(int k, const Vec6& p, const Eigen::Matrix<S, 6, 1>& X) const {
    Eigen::Matrix<S, 6, 1> out;
    const double s = k == 1 ? 1.0 : -1.0;
    out.template head<3>() = s * first.j<S>(p.head<3>(), X.template head<3>());
    out.template tail<3>() = second.j<S>(p.tail<3>(), X.template tail<3>());
    return out;
  }

  template <class S>
  Eigen::Matrix<S, 6, 1> P(const Eigen::Matrix<S, 6, 1>& X) const {
    Eigen::Matrix<S, 6, 1> out = X;
    out.template tail<3>() = -X.template tail<3>();
    return out;
  }

  /// Ωₖ(X, Y) = (−1)^{k+1} ω₁(X₁,Y₁) + ω₂(X₂,Y₂) with ωᵢ = gᵢ(jᵢ·,·).
  template <class S>
  S omega(int k, const Vec6& p, const Eigen::Matrix<S, 6, 1>& X, const Eigen::Matrix<S, 6, 1>& Y) const {
    return metric<S>(p, J<S>(k, p, X), Y);
  }

  template <class S>
  Eigen::Matrix<S, 6, 1> christoffel(const Vec6& p, const Eigen::Matrix<S, 6, 1>& X,
                                     const Eigen::Matrix<S, 6, 1>& Y) const {
    Eigen::Matrix<S, 6, 1> out;
    out.template head<3>() = first.christoffel<S>(p.head<3>(), X.template head<3>(), Y.template head<3>());
    out.template tail<3>() = second.christoffel<S>(p.tail<3>(), X.template tail<3>(), Y.template tail<3>());
    return out;
  }

  template <class S>
  Eigen::Matrix<S, 6, 1> project_tangent(const Vec6& p, const Eigen::Matrix<S, 6, 1>& X) const {
    Eigen::Matrix<S, 6, 1> out;
    out.template head<3>() = first.project_tangent<S>(p.head<3>(), X.template head<3>());
    out.template tail<3>() = second.project_tangent<S>(p.tail<3>(), X.template tail<3>());
    return out;
  }
};

/// Discretized isothermal immersion F: D → Σ₁×Σ₂ on a rectangular grid.
struct ImmersedPatch {
  GridSpec grid;
  ProductModel model;
  Field<Vec6> points;

  ImmersedPatch(const GridSpec& g, ProductModel m) : grid(g), model(std::move(m)), points(g, Vec6::Zero()) {}
};

struct LabOptions {
  double isothermal_tol = 1e-6;   ///< relative to e^{2u}
  double immersion_eps = 1e-10;   ///< lower bound on e^{2u}
  double clamp_tol = 1e-6;        ///< largest accepted |Cₖ| − 1 before clamping
  double complex_eps = 1e-6;      ///< node is a complex point when 1 − Cₖ² < complex_eps
  double lagrangian_eps = 1e-6;   ///< node is Lagrangian for Ωₖ when |Cₖ| < lagrangian_eps
  double minimal_tol = 1e-6;      ///< |H| bound for the minimal-surface formulas
  /// Identity residuals ignore nodes this close to a non-periodic edge:
  /// one-sided stencils nested twice (u comes from dF) only reach second
  /// order there.
  int boundary_margin = 4;
};

/// First and covariant second derivatives of the immersion.
struct TangentData {
  Field<Vec6> Fx, Fy;
  Field<Vec6> Dxx, Dxy, Dyy;  ///< ∇_{∂i} dF(∂j)
  ScalarField E;              ///< e^{2u}
  ScalarField K1, K2;         ///< factor curvatures at F₁, F₂

  Vec6c Fz(std::size_t k) const { return 0.5 * (Fx[k].cast<cd>() - cd(0, 1) * Fy[k].cast<cd>()); }
  Vec6c Fzz(std::size_t k) const {
    return 0.25 * (Dxx[k].cast<cd>() - Dyy[k].cast<cd>() - cd(0, 2) * Dxy[k].cast<cd>());
  }
  Vec6 Fzzb(std::size_t k) const { return 0.25 * (Dxx[k] + Dyy[k]); }
};

/// Validates isothermality and immersion; throws AnalysisError otherwise.
TangentData tangent_data(const ImmersedPatch& patch, const LabOptions& opts = {});

struct KahlerFunctions {
  ScalarField C1, C2;
  double max_overshoot = 0.0;  ///< largest |Cₖ| − 1 seen before clamping
};

KahlerFunctions kahler_functions(const ImmersedPatch& patch, const LabOptions& opts = {});
KahlerFunctions kahler_functions(const ImmersedPatch& patch, const TangentData& tangent, const LabOptions& opts = {});

/// (Jac(F₁), Jac(F₂)) = ((C₁ − C₂)/2, (C₁ + C₂)/2).
std::pair<ScalarField, ScalarField> jacobians(const ScalarField& C1, const ScalarField& C2);

/// Complex unit normal ξ = (N − iN̄)/√2 with the deterministic gauge: N is
/// the normalized projection of the first Σ₁ basis vector onto the normal
/// plane (Σ₂ basis vector when that projection is shorter than 1e−6), and
/// N̄ completes the frame so that (F_x, F_y, N, N̄) is oriented opposite to
/// (e, je, e', je'). That orientation puts the normal part of J₁F_z along ξ
/// and the normal part of J₂F_z along ξ̄.
Field<Vec6c> normal_frame(const ImmersedPatch& patch, const LabOptions& opts = {});
Field<Vec6c> normal_frame(const ImmersedPatch& patch, const TangentData& tangent);

struct FundamentalData {
  GridSpec grid;
  ScalarField u, C1, C2;
  ComplexField A, gamma1, gamma2, f1, f2;

  FundamentalData() = default;
  explicit FundamentalData(const GridSpec& g)
      : grid(g), u(g), C1(g), C2(g), A(g), gamma1(g), gamma2(g), f1(g), f2(g) {}
};

FundamentalData fundamental_data(const ImmersedPatch& patch, const Field<Vec6c>& xi, const LabOptions& opts = {});
FundamentalData fundamental_data(const ImmersedPatch& patch, const TangentData& tangent, const Field<Vec6c>& xi,
                                 const LabOptions& opts = {});

struct SecondFundamental {
  Field<Vec6> hxx, hxy, hyy;  ///< normal parts of ∇_{∂i} dF(∂j)
  Field<Vec6> H;              ///< mean curvature vector
  ScalarField h_norm2;        ///< |h|² in an orthonormal tangent frame
  ScalarField H_norm;
  double max_H = 0.0;
};

SecondFundamental second_fundamental(const ImmersedPatch& patch, const Field<Vec6c>& xi);
SecondFundamental second_fundamental(const ImmersedPatch& patch, const TangentData& tangent, const Field<Vec6c>& xi);

struct CurvatureReport {
  ScalarField K;          ///< −e^{−2u}Δu
  ScalarField K_formula;  ///< from |f₁|, |f₂|, Cₖ (or the Gauss equation)
  ScalarField Kperp;
  ScalarField M1, M2;
  ScalarField K1, K2;
  ScalarField residual;   ///< |K − K_formula|
  bool gauss_equation_mode = false;
};

/// Minimal-surface curvature formulas. When `second` is given and its
/// max |H| exceeds `opts.minimal_tol`, K_formula switches to the Gauss
/// equation with the measured h and H.
CurvatureReport curvature_report(const FundamentalData& data, const ScalarField& K1, const ScalarField& K2,
                                 const SecondFundamental* second = nullptr, const LabOptions& opts = {});

struct ResidualStat {
  std::string name;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;  ///< guarded nodes (complex points), boundary band excluded
  ScalarField grid;  ///< |residual| per node, NaN where skipped or in the boundary band
};

struct IdentityReport {
  std::vector<ResidualStat> entries;
  std::size_t complex_nodes = 0;
  std::size_t boundary_nodes = 0;

  const ResidualStat& at(const std::string& name) const;
  double worst() const;
};

/// Residuals of the structure equations, Kähler-function derivative
/// identities and the |fⱼ|² relation. Identities dividing by γₖ or 1 ± Cⱼ
/// skip nodes near complex points.
IdentityReport identity_suite(const FundamentalData& data, const CurvatureReport& report, const LabOptions& opts = {});

enum NodeLabel : unsigned {
  kGeneric = 0,
  kComplexJ1 = 1u << 0,
  kComplexJ2 = 1u << 1,
  kLagrangianO1 = 1u << 2,
  kLagrangianO2 = 1u << 3,
};

struct Classification {
  Field<unsigned> labels;
  unsigned common = 0;  ///< labels carried by every node
  std::string summary() const;
};

std::string label_names(unsigned mask);
Classification classify(const FundamentalData& data, const LabOptions& opts = {});

/// Everything above for one patch.
struct Analysis {
  TangentData tangent;
  KahlerFunctions kahler;
  Field<Vec6c> xi;
  FundamentalData data;
  SecondFundamental second;
  CurvatureReport curvature;
  IdentityReport identities;
  Classification classification;
};

Analysis analyze(const ImmersedPatch& patch, const LabOptions& opts = {});

/// Same patch with z ↦ z̄ (rows reversed, origin mirrored).
ImmersedPatch reflect_orientation(const ImmersedPatch& patch);

/// ξ* = e^{iθ}ξ node by node.
Field<Vec6c> regauge(const Field<Vec6c>& xi, const ScalarField& theta);

}  // namespace prodsurf
