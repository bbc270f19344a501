#include "prodsurf/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace prodsurf {

namespace {

const Vec2 kBasePoint(0.3, -0.2);

template <class Fn>
ImmersedPatch build(const GridSpec& g, Fn&& fn) {
  ImmersedPatch patch(g, sphere_chart_product());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto [a, b] = fn(g.x(i), g.y(j));
      patch.points(i, j) << a.x(), a.y(), 0.0, b.x(), b.y(), 0.0;
    }
  return patch;
}

}  // namespace

ProductModel sphere_chart_product() {
  return {FactorModel::chart(SurfaceFactor::sphere()), FactorModel::chart(SurfaceFactor::sphere())};
}

GridSpec square_grid(int n, double half) {
  GridSpec g;
  g.nx = g.ny = n;
  g.x0 = g.y0 = -half;
  g.h = 2.0 * half / (n - 1);
  return g;
}

ImmersedPatch slice_fixture(int n) {
  return build(square_grid(n), [](double x, double y) { return std::pair{Vec2(x, y), kBasePoint}; });
}

ImmersedPatch geodesic_product_fixture(int n) {
  return build(square_grid(n), [](double x, double y) {
    return std::pair{Vec2(std::tan(0.5 * x), 0.0), Vec2(0.0, std::tan(0.5 * y))};
  });
}

ImmersedPatch diagonal_fixture(int n) {
  return build(square_grid(n), [](double x, double y) { return std::pair{Vec2(x, y), Vec2(x, y)}; });
}

ImmersedPatch small_circle_fixture(double r, int n) {
  const double rho = std::tan(0.5 * r), s = std::sin(r);
  return build(square_grid(n), [rho, s](double x, double y) {
    return std::pair{Vec2(rho * std::cos(x / s), rho * std::sin(x / s)), Vec2(0.0, std::tan(0.5 * y))};
  });
}

std::vector<std::string> fixture_names() { return {"slice", "geodesic-product", "diagonal", "small-circle"}; }

ImmersedPatch named_fixture(const std::string& name, int n) {
  if (name == "slice") return slice_fixture(n);
  if (name == "geodesic-product") return geodesic_product_fixture(n);
  if (name == "diagonal") return diagonal_fixture(n);
  if (name == "small-circle") return small_circle_fixture(1.0, n);
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace prodsurf
