#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "prodsurf/grid.hpp"

namespace prodsurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class FactorKind { sphere, hyperbolic, flat, conformal };

std::string to_string(FactorKind kind);
FactorKind factor_kind_from_string(const std::string& name);

/// A Riemannian surface in a single conformal chart, g = e^{2φ}(da² + db²).
/// Space forms use the stereographic chart (sphere, centred on the north
/// pole) and the Poincaré disk (hyperbolic plane).
class SurfaceFactor {
 public:
  using ScalarFn = std::function<double(const Vec2&)>;
  using GradientFn = std::function<Vec2(const Vec2&)>;

  static SurfaceFactor sphere();
  static SurfaceFactor hyperbolic();
  static SurfaceFactor flat();
  /// Generic factor from a closed-form φ and its gradient. Curvature comes
  /// from `curvature_override` when given and from a 5-point stencil on φ
  /// otherwise.
  static SurfaceFactor conformal(ScalarFn phi, GradientFn grad_phi, std::optional<ScalarFn> curvature_override = {},
                                 double stencil_h = 1e-3);
  /// Generic factor from φ sampled on a non-periodic grid. φ is interpolated
  /// bicubically; curvature is evaluated on the grid with 5-point stencils
  /// (one-sided at the boundary) and interpolated bilinearly.
  static SurfaceFactor from_phi_grid(const ScalarField& phi);

  FactorKind kind() const { return kind_; }
  bool is_space_form() const { return kind_ != FactorKind::conformal; }

  bool in_domain(const Vec2& a) const;
  /// Throws DomainError when `a` lies outside the chart.
  void require_domain(const Vec2& a) const;

  double phi(const Vec2& a) const;
  Vec2 grad_phi(const Vec2& a) const;
  /// e^{2φ}
  double scale(const Vec2& a) const;
  double curvature(const Vec2& a) const;
  /// −e^{−2φ}Δφ with the 5-point stencil of spacing h; available for every kind.
  double stencil_curvature(const Vec2& a, double h) const;

  double metric(const Vec2& a, const Vec2& X, const Vec2& Y) const;
  /// ω(X, Y) = g(jX, Y).
  double area_form(const Vec2& a, const Vec2& X, const Vec2& Y) const;

 private:
  FactorKind kind_ = FactorKind::flat;
  ScalarFn phi_;
  GradientFn grad_;
  std::optional<ScalarFn> curvature_;
  std::function<bool(const Vec2&)> domain_;
  double stencil_h_ = 1e-3;
};

/// Rotation by +π/2 in a conformal chart.
inline Vec2 rotate_quarter(const Vec2& X) { return {-X.y(), X.x()}; }

struct ProductPoint {
  Vec2 x = Vec2::Zero();
  Vec2 y = Vec2::Zero();
};

/// Tangent vector X = X1 + X2 split along TΣ₁ ⊕ TΣ₂.
struct SplitVector {
  Vec2 X1 = Vec2::Zero();
  Vec2 X2 = Vec2::Zero();

  SplitVector operator+(const SplitVector& o) const { return {X1 + o.X1, X2 + o.X2}; }
  SplitVector operator-(const SplitVector& o) const { return {X1 - o.X1, X2 - o.X2}; }
  SplitVector operator*(double s) const { return {X1 * s, X2 * s}; }
  bool operator==(const SplitVector& o) const { return X1 == o.X1 && X2 == o.X2; }
};

/// Σ₁×Σ₂ with G = g₁⊕g₂, J₁ = j₁⊕j₂, J₂ = −j₁⊕j₂, P = J₁J₂ and
/// Ωₖ = (−1)^{k+1}π₁*ω₁ + π₂*ω₂.
class ProductSurface {
 public:
  ProductSurface(SurfaceFactor first, SurfaceFactor second) : first_(std::move(first)), second_(std::move(second)) {}

  const SurfaceFactor& first() const { return first_; }
  const SurfaceFactor& second() const { return second_; }

  void require_domain(const ProductPoint& p) const;

  double metric(const ProductPoint& p, const SplitVector& X, const SplitVector& Y) const;
  SplitVector apply_J(int k, const ProductPoint& p, const SplitVector& X) const;
  SplitVector apply_P(const ProductPoint& p, const SplitVector& X) const;
  double omega(int k, const ProductPoint& p, const SplitVector& X, const SplitVector& Y) const;

 private:
  SurfaceFactor first_;
  SurfaceFactor second_;
};

/// Recovers the factor components of a product vector from the paracomplex
/// structure: X1 = (X + PX)/2, X2 = (X − PX)/2.
SplitVector split_with_P(const ProductSurface& M, const ProductPoint& p, const SplitVector& X);

/// Embedding of a space-form chart into R³: unit sphere (Euclidean), upper
/// sheet of the hyperboloid ⟨x,x⟩ = −x₀² + x₁² + x₂² = −1 (Lorentzian), or
/// the plane x₂ = 0 (Euclidean).
class EmbeddingModel {
 public:
  explicit EmbeddingModel(FactorKind kind);

  FactorKind kind() const { return kind_; }
  Vec3 to_ambient(const Vec2& a) const;
  Vec2 to_chart(const Vec3& x) const;
  /// d(to_ambient) applied to a chart vector.
  Vec3 push_forward(const Vec2& a, const Vec2& X) const;

  double inner(const Vec3& x, const Vec3& y) const;
  /// ⟨x,x⟩ − 1 (sphere), ⟨x,x⟩ + 1 (hyperboloid), x₂ (plane).
  double quadric_residual(const Vec3& x) const;
  /// Nearest point on the quadric along the ray (sphere, hyperboloid) or the
  /// orthogonal projection (plane).
  Vec3 normalize(const Vec3& x) const;

 private:
  FactorKind kind_;
};

}  // namespace prodsurf
