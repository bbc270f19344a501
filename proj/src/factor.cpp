#include "prodsurf/factor.hpp"

#include <algorithm>
#include <cmath>

namespace prodsurf {

std::string to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::sphere: return "sphere";
    case FactorKind::hyperbolic: return "hyperbolic";
    case FactorKind::flat: return "flat";
    case FactorKind::conformal: return "conformal";
  }
  return "unknown";
}

FactorKind factor_kind_from_string(const std::string& name) {
  if (name == "sphere" || name == "s2") return FactorKind::sphere;
  if (name == "hyperbolic" || name == "h2") return FactorKind::hyperbolic;
  if (name == "flat" || name == "r2") return FactorKind::flat;
  if (name == "conformal") return FactorKind::conformal;
  throw std::invalid_argument("unknown factor kind '" + name + "'");
}

SurfaceFactor SurfaceFactor::sphere() {
  SurfaceFactor f;
  f.kind_ = FactorKind::sphere;
  f.phi_ = [](const Vec2& a) { return std::log(2.0 / (1.0 + a.squaredNorm())); };
  f.grad_ = [](const Vec2& a) -> Vec2 { return -2.0 * a / (1.0 + a.squaredNorm()); };
  f.curvature_ = [](const Vec2&) { return 1.0; };
  f.domain_ = [](const Vec2& a) { return std::isfinite(a.x()) && std::isfinite(a.y()); };
  return f;
}

SurfaceFactor SurfaceFactor::hyperbolic() {
  SurfaceFactor f;
  f.kind_ = FactorKind::hyperbolic;
  f.phi_ = [](const Vec2& a) { return std::log(2.0 / (1.0 - a.squaredNorm())); };
  f.grad_ = [](const Vec2& a) -> Vec2 { return 2.0 * a / (1.0 - a.squaredNorm()); };
  f.curvature_ = [](const Vec2&) { return -1.0; };
  f.domain_ = [](const Vec2& a) { return a.squaredNorm() < 1.0; };
  return f;
}

SurfaceFactor SurfaceFactor::flat() {
  SurfaceFactor f;
  f.kind_ = FactorKind::flat;
  f.phi_ = [](const Vec2&) { return 0.0; };
  f.grad_ = [](const Vec2&) -> Vec2 { return Vec2::Zero(); };
  f.curvature_ = [](const Vec2&) { return 0.0; };
  f.domain_ = [](const Vec2& a) { return std::isfinite(a.x()) && std::isfinite(a.y()); };
  return f;
}

SurfaceFactor SurfaceFactor::conformal(ScalarFn phi, GradientFn grad_phi, std::optional<ScalarFn> curvature_override,
                                       double stencil_h) {
  SurfaceFactor f;
  f.kind_ = FactorKind::conformal;
  f.phi_ = std::move(phi);
  f.grad_ = std::move(grad_phi);
  f.curvature_ = std::move(curvature_override);
  f.domain_ = [](const Vec2& a) { return std::isfinite(a.x()) && std::isfinite(a.y()); };
  f.stencil_h_ = stencil_h;
  return f;
}

namespace {

// Catmull-Rom weights for the four nodes around fractional offset s ∈ [0,1).
void catmull_rom(double s, double w[4], double dw[4]) {
  const double s2 = s * s, s3 = s2 * s;
  w[0] = 0.5 * (-s3 + 2 * s2 - s);
  w[1] = 0.5 * (3 * s3 - 5 * s2 + 2);
  w[2] = 0.5 * (-3 * s3 + 4 * s2 + s);
  w[3] = 0.5 * (s3 - s2);
  dw[0] = 0.5 * (-3 * s2 + 4 * s - 1);
  dw[1] = 0.5 * (9 * s2 - 10 * s);
  dw[2] = 0.5 * (-9 * s2 + 8 * s + 1);
  dw[3] = 0.5 * (3 * s2 - 2 * s);
}

struct GridSampler {
  ScalarField phi;
  ScalarField curvature;

  double xmax() const { return phi.grid.x(phi.grid.nx - 1); }
  double ymax() const { return phi.grid.y(phi.grid.ny - 1); }

  bool contains(const Vec2& a) const {
    const auto& g = phi.grid;
    return a.x() >= g.x0 && a.x() <= xmax() && a.y() >= g.y0 && a.y() <= ymax();
  }

  // Cell index and offset, clamped so the last node maps into the last cell.
  static std::pair<int, double> locate(double v, double v0, double h, int n) {
    double t = (v - v0) / h;
    int c = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
    return {c, t - c};
  }

  double node(int i, int j) const {
    const auto& g = phi.grid;
    return phi(std::clamp(i, 0, g.nx - 1), std::clamp(j, 0, g.ny - 1));
  }

  // Value and gradient of the bicubic interpolant.
  std::pair<double, Vec2> eval(const Vec2& a) const {
    const auto& g = phi.grid;
    auto [ci, sx] = locate(a.x(), g.x0, g.h, g.nx);
    auto [cj, sy] = locate(a.y(), g.y0, g.h, g.ny);
    double wx[4], dwx[4], wy[4], dwy[4];
    catmull_rom(sx, wx, dwx);
    catmull_rom(sy, wy, dwy);
    double v = 0, gx = 0, gy = 0;
    for (int q = 0; q < 4; ++q)
      for (int p = 0; p < 4; ++p) {
        const double n = node(ci - 1 + p, cj - 1 + q);
        v += wx[p] * wy[q] * n;
        gx += dwx[p] * wy[q] * n;
        gy += wx[p] * dwy[q] * n;
      }
    return {v, Vec2(gx, gy) / g.h};
  }

  double curvature_at(const Vec2& a) const {
    const auto& g = curvature.grid;
    auto [ci, sx] = locate(a.x(), g.x0, g.h, g.nx);
    auto [cj, sy] = locate(a.y(), g.y0, g.h, g.ny);
    return (1 - sx) * (1 - sy) * curvature(ci, cj) + sx * (1 - sy) * curvature(ci + 1, cj) +
           (1 - sx) * sy * curvature(ci, cj + 1) + sx * sy * curvature(ci + 1, cj + 1);
  }
};

// Second-order second derivative along a line, one-sided at the ends.
double second_diff(const std::function<double(int)>& at, int k, int n, double h) {
  if (k == 0) return (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / (h * h);
  if (k == n - 1) return (2 * at(n - 1) - 5 * at(n - 2) + 4 * at(n - 3) - at(n - 4)) / (h * h);
  return (at(k - 1) - 2 * at(k) + at(k + 1)) / (h * h);
}

}  // namespace

SurfaceFactor SurfaceFactor::from_phi_grid(const ScalarField& phi) {
  const auto& g = phi.grid;
  if (g.nx < 4 || g.ny < 4) throw StencilError("phi grid needs at least 4 nodes per axis");
  auto sampler = std::make_shared<GridSampler>();
  sampler->phi = phi;
  sampler->curvature = ScalarField(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double pxx = second_diff([&](int k) { return phi(k, j); }, i, g.nx, g.h);
      const double pyy = second_diff([&](int k) { return phi(i, k); }, j, g.ny, g.h);
      sampler->curvature(i, j) = -std::exp(-2.0 * phi(i, j)) * (pxx + pyy);
    }
  SurfaceFactor f;
  f.kind_ = FactorKind::conformal;
  f.phi_ = [sampler](const Vec2& a) { return sampler->eval(a).first; };
  f.grad_ = [sampler](const Vec2& a) { return sampler->eval(a).second; };
  f.curvature_ = [sampler](const Vec2& a) { return sampler->curvature_at(a); };
  f.domain_ = [sampler](const Vec2& a) { return sampler->contains(a); };
  return f;
}

bool SurfaceFactor::in_domain(const Vec2& a) const { return domain_(a); }

void SurfaceFactor::require_domain(const Vec2& a) const {
  if (!domain_(a))
    throw DomainError(to_string(kind_) + " chart does not contain (" + std::to_string(a.x()) + ", " +
                      std::to_string(a.y()) + ")");
}

double SurfaceFactor::phi(const Vec2& a) const { return phi_(a); }
Vec2 SurfaceFactor::grad_phi(const Vec2& a) const { return grad_(a); }
double SurfaceFactor::scale(const Vec2& a) const { return std::exp(2.0 * phi_(a)); }

double SurfaceFactor::stencil_curvature(const Vec2& a, double h) const {
  const double lap = (phi_(a + Vec2(h, 0)) + phi_(a - Vec2(h, 0)) + phi_(a + Vec2(0, h)) + phi_(a - Vec2(0, h)) -
                      4.0 * phi_(a)) /
                     (h * h);
  return -std::exp(-2.0 * phi_(a)) * lap;
}

double SurfaceFactor::curvature(const Vec2& a) const {
  require_domain(a);
  if (curvature_) return (*curvature_)(a);
  return stencil_curvature(a, stencil_h_);
}

double SurfaceFactor::metric(const Vec2& a, const Vec2& X, const Vec2& Y) const { return scale(a) * X.dot(Y); }

double SurfaceFactor::area_form(const Vec2& a, const Vec2& X, const Vec2& Y) const {
  return scale(a) * (X.x() * Y.y() - X.y() * Y.x());
}

void ProductSurface::require_domain(const ProductPoint& p) const {
  first_.require_domain(p.x);
  second_.require_domain(p.y);
}

double ProductSurface::metric(const ProductPoint& p, const SplitVector& X, const SplitVector& Y) const {
  require_domain(p);
  return first_.metric(p.x, X.X1, Y.X1) + second_.metric(p.y, X.X2, Y.X2);
}

SplitVector ProductSurface::apply_J(int k, const ProductPoint& p, const SplitVector& X) const {
  if (k != 1 && k != 2) throw std::invalid_argument("complex structure index must be 1 or 2");
  require_domain(p);
  const double s = (k == 1) ? 1.0 : -1.0;
  return {s * rotate_quarter(X.X1), rotate_quarter(X.X2)};
}

SplitVector ProductSurface::apply_P(const ProductPoint& p, const SplitVector& X) const {
  require_domain(p);
  return {X.X1, -X.X2};
}

double ProductSurface::omega(int k, const ProductPoint& p, const SplitVector& X, const SplitVector& Y) const {
  if (k != 1 && k != 2) throw std::invalid_argument("symplectic form index must be 1 or 2");
  require_domain(p);
  const double s = (k == 1) ? 1.0 : -1.0;
  return s * first_.area_form(p.x, X.X1, Y.X1) + second_.area_form(p.y, X.X2, Y.X2);
}

SplitVector split_with_P(const ProductSurface& M, const ProductPoint& p, const SplitVector& X) {
  const SplitVector PX = M.apply_P(p, X);
  const SplitVector plus = (X + PX) * 0.5;
  const SplitVector minus = (X - PX) * 0.5;
  return {plus.X1, minus.X2};
}

EmbeddingModel::EmbeddingModel(FactorKind kind) : kind_(kind) {
  if (kind == FactorKind::conformal) throw std::invalid_argument("generic conformal factors have no embedding model");
}

Vec3 EmbeddingModel::to_ambient(const Vec2& a) const {
  const double r2 = a.squaredNorm();
  switch (kind_) {
    case FactorKind::sphere: return Vec3(2 * a.x(), 2 * a.y(), 1 - r2) / (1 + r2);
    case FactorKind::hyperbolic:
      if (r2 >= 1.0) throw DomainError("point outside the Poincaré disk");
      return Vec3(1 + r2, 2 * a.x(), 2 * a.y()) / (1 - r2);
    default: return Vec3(a.x(), a.y(), 0.0);
  }
}

Vec2 EmbeddingModel::to_chart(const Vec3& x) const {
  switch (kind_) {
    case FactorKind::sphere:
      if (1.0 + x.z() <= 0.0) throw DomainError("south pole is outside the stereographic chart");
      return Vec2(x.x(), x.y()) / (1.0 + x.z());
    case FactorKind::hyperbolic: return Vec2(x.y(), x.z()) / (1.0 + x.x());
    default: return Vec2(x.x(), x.y());
  }
}

Vec3 EmbeddingModel::push_forward(const Vec2& a, const Vec2& X) const {
  const double r2 = a.squaredNorm();
  const double dr2 = 2 * a.dot(X);
  switch (kind_) {
    case FactorKind::sphere: {
      const double d = 1 + r2;
      const Vec3 num(2 * a.x(), 2 * a.y(), 1 - r2);
      const Vec3 dnum(2 * X.x(), 2 * X.y(), -dr2);
      return dnum / d - num * dr2 / (d * d);
    }
    case FactorKind::hyperbolic: {
      const double d = 1 - r2;
      const Vec3 num(1 + r2, 2 * a.x(), 2 * a.y());
      const Vec3 dnum(dr2, 2 * X.x(), 2 * X.y());
      return dnum / d + num * dr2 / (d * d);
    }
    default: return Vec3(X.x(), X.y(), 0.0);
  }
}

double EmbeddingModel::inner(const Vec3& x, const Vec3& y) const {
  if (kind_ == FactorKind::hyperbolic) return -x.x() * y.x() + x.y() * y.y() + x.z() * y.z();
  return x.dot(y);
}

double EmbeddingModel::quadric_residual(const Vec3& x) const {
  switch (kind_) {
    case FactorKind::sphere: return inner(x, x) - 1.0;
    case FactorKind::hyperbolic: return inner(x, x) + 1.0;
    default: return x.z();
  }
}

Vec3 EmbeddingModel::normalize(const Vec3& x) const {
  switch (kind_) {
    case FactorKind::sphere: return x / x.norm();
    case FactorKind::hyperbolic: {
      const double q = -inner(x, x);
      if (q <= 0.0 || x.x() <= 0.0) throw DomainError("vector is not timelike future-pointing");
      return x / std::sqrt(q);
    }
    default: return Vec3(x.x(), x.y(), 0.0);
  }
}

}  // namespace prodsurf
