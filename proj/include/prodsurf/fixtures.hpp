#pragma once

#include <string>
#include <vector>

#include "prodsurf/immersion_lab.hpp"

namespace prodsurf {

/// S²×S² in stereographic charts.
ProductModel sphere_chart_product();

/// Square non-periodic grid of n×n nodes covering [−half, half]².
GridSpec square_grid(int n, double half = 0.5);

/// (x, y) ↦ ((x, y), q): the slice Σ₁×{q}.
ImmersedPatch slice_fixture(int n = 33);
/// Product of unit-speed great circles through the north pole.
ImmersedPatch geodesic_product_fixture(int n = 33);
/// (x, y) ↦ ((x, y), (x, y)).
ImmersedPatch diagonal_fixture(int n = 33);
/// Latitude circle at polar angle r times a great circle; |H| = cot(r)/2.
ImmersedPatch small_circle_fixture(double r, int n = 33);

std::vector<std::string> fixture_names();
/// Throws std::invalid_argument for unknown names.
ImmersedPatch named_fixture(const std::string& name, int n = 33);

}  // namespace prodsurf
