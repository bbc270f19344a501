#pragma once

#include <cmath>
#include <optional>

#include "prodsurf/factor.hpp"

namespace prodsurf {

/// Complex-bilinear (non-conjugating) Euclidean pairing.
template <class A, class B>
auto bdot(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return (x.transpose() * y).value();
}

/// Bilinear cross product. Eigen's cross() conjugates complex operands.
template <class A, class B>
auto bcross(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  using S = decltype(x(0) * y(0));
  return Eigen::Matrix<S, 3, 1>(x(1) * y(2) - x(2) * y(1), x(2) * y(0) - x(0) * y(2), x(0) * y(1) - x(1) * y(0));
}

enum class Representation { chart, embedded };

/// Geometry of one factor as seen by a discretized immersion. Points and
/// tangent vectors are stored as 3-vectors: chart data use the first two
/// components, embedded data are ambient coordinates on the quadric.
///
/// The Levi-Civita connection along a map is ∂V + Γ(Ḟ, V) with
///   chart:      Γ(X,Y) = X(φ)Y + Y(φ)X − (X·Y)∇φ
///   sphere:     Γ(X,Y) = (X·Y) p
///   hyperboloid Γ(X,Y) = −⟨X,Y⟩ p
///   plane:      Γ = 0
class FactorModel {
 public:
  static FactorModel chart(SurfaceFactor factor) { return FactorModel(std::move(factor), Representation::chart); }
  static FactorModel embedded(FactorKind kind);

  const SurfaceFactor& factor() const { return factor_; }
  FactorKind kind() const { return factor_.kind(); }
  Representation representation() const { return rep_; }

  static Vec2 chart_coords(const Vec3& p) { return p.head<2>(); }

  template <class S>
  S metric(const Vec3& p, const Eigen::Matrix<S, 3, 1>& X, const Eigen::Matrix<S, 3, 1>& Y) const {
    if (rep_ == Representation::chart) return factor_.scale(chart_coords(p)) * (X(0) * Y(0) + X(1) * Y(1));
    if (kind() == FactorKind::hyperbolic) return -X(0) * Y(0) + X(1) * Y(1) + X(2) * Y(2);
    return bdot(X, Y);
  }

  /// Rotation by +π/2 in the tangent plane.
  template <class S>
  Eigen::Matrix<S, 3, 1> j(const Vec3& p, const Eigen::Matrix<S, 3, 1>& X) const {
    using V = Eigen::Matrix<S, 3, 1>;
    if (rep_ == Representation::chart) return V(-X(1), X(0), S(0));
    switch (kind()) {
      case FactorKind::sphere: return bcross(p.cast<S>(), X);
      case FactorKind::hyperbolic: {
        V c = bcross(p.cast<S>(), X);
        c(0) = -c(0);
        return c;
      }
      default: return bcross(Vec3(0, 0, 1).cast<S>(), X);
    }
  }

  template <class S>
  Eigen::Matrix<S, 3, 1> christoffel(const Vec3& p, const Eigen::Matrix<S, 3, 1>& X,
                                     const Eigen::Matrix<S, 3, 1>& Y) const {
    using V = Eigen::Matrix<S, 3, 1>;
    if (rep_ == Representation::chart) {
      const Vec2 g = factor_.grad_phi(chart_coords(p));
      const S Xphi = X(0) * g.x() + X(1) * g.y();
      const S Yphi = Y(0) * g.x() + Y(1) * g.y();
      const S XY = X(0) * Y(0) + X(1) * Y(1);
      V out = Xphi * Y + Yphi * X;
      out(0) -= XY * g.x();
      out(1) -= XY * g.y();
      out(2) = S(0);
      return out;
    }
    switch (kind()) {
      case FactorKind::sphere: return bdot(X, Y) * p.cast<S>();
      case FactorKind::hyperbolic: return -metric<S>(p, X, Y) * p.cast<S>();
      default: return V::Zero();
    }
  }

  template <class S>
  Eigen::Matrix<S, 3, 1> project_tangent(const Vec3& p, const Eigen::Matrix<S, 3, 1>& X) const {
    using V = Eigen::Matrix<S, 3, 1>;
    if (rep_ == Representation::chart) return V(X(0), X(1), S(0));
    switch (kind()) {
      case FactorKind::sphere: return X - bdot(p.cast<S>(), X) * p.cast<S>();
      case FactorKind::hyperbolic: {
        const V pc = p.cast<S>();
        return X + metric<S>(p, pc, X) * pc;
      }
      default: return V(X(0), X(1), S(0));
    }
  }

  /// Unit tangent vector varying smoothly with p; the second basis vector is
  /// j of it. Returns nothing only if both reference axes are degenerate.
  Vec3 unit_tangent(const Vec3& p) const;

  double curvature(const Vec3& p) const {
    if (rep_ == Representation::chart) return factor_.curvature(chart_coords(p));
    return kind() == FactorKind::sphere ? 1.0 : (kind() == FactorKind::hyperbolic ? -1.0 : 0.0);
  }

  double quadric_residual(const Vec3& p) const {
    return rep_ == Representation::chart ? 0.0 : embedding_->quadric_residual(p);
  }

  void require_domain(const Vec3& p) const {
    if (rep_ == Representation::chart) factor_.require_domain(chart_coords(p));
  }

 private:
  FactorModel(SurfaceFactor factor, Representation rep) : factor_(std::move(factor)), rep_(rep) {
    if (rep_ == Representation::embedded) embedding_.emplace(factor_.kind());
  }

  SurfaceFactor factor_;
  Representation rep_;
  std::optional<EmbeddingModel> embedding_;
};

}  // namespace prodsurf
