#include "prodsurf/grid.hpp"

#include <numbers>

namespace prodsurf {

GridSpec torus_grid(int n) {
  GridSpec g;
  g.nx = g.ny = n;
  g.h = 2.0 * std::numbers::pi / n;
  g.periodic_x = g.periodic_y = true;
  return g;
}

ComplexField to_complex(const ScalarField& f) {
  return map_field(f, [](double v) { return cd(v, 0.0); });
}

std::pair<ComplexField, ComplexField> complex_derivatives(const ComplexField& f) {
  const ComplexField fx = d_dx(f);
  const ComplexField fy = d_dy(f);
  ComplexField dz(f.grid), dzb(f.grid);
  const cd i(0.0, 1.0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    dz[k] = 0.5 * (fx[k] - i * fy[k]);
    dzb[k] = 0.5 * (fx[k] + i * fy[k]);
  }
  return {std::move(dz), std::move(dzb)};
}

std::pair<ComplexField, ComplexField> complex_derivatives(const ScalarField& f) {
  return complex_derivatives(to_complex(f));
}

}  // namespace prodsurf
