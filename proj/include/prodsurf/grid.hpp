#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace prodsurf {

using cd = std::complex<double>;

/// Rectangular node grid. Node (i, j) sits at (x0 + i*h, y0 + j*h) and is
/// stored row-major at j*nx + i. A periodic axis with n nodes covers n*h.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  bool periodic_x = false;
  bool periodic_y = false;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }

  bool operator==(const GridSpec& o) const {
    return nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 && h == o.h &&
           periodic_x == o.periodic_x && periodic_y == o.periodic_y;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

/// Periodic grid with n×n nodes on [0, 2π)².
GridSpec torus_grid(int n);

class StencilError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct Field {
  GridSpec grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(const GridSpec& g, const T& fill = T{}) : grid(g), values(g.size(), fill) {}

  T& operator()(int i, int j) { return values[grid.index(i, j)]; }
  const T& operator()(int i, int j) const { return values[grid.index(i, j)]; }
  T& operator[](std::size_t k) { return values[k]; }
  const T& operator[](std::size_t k) const { return values[k]; }
  std::size_t size() const { return values.size(); }
};

using ScalarField = Field<double>;
using ComplexField = Field<cd>;

template <class T, class Fn>
auto map_field(const Field<T>& f, Fn&& fn) {
  using R = decltype(fn(f.values[0]));
  Field<R> out;
  out.grid = f.grid;
  out.values.reserve(f.size());
  for (const auto& v : f.values) out.values.push_back(fn(v));
  return out;
}

template <class Fn>
ScalarField sample(const GridSpec& g, Fn&& fn) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = fn(g.x(i), g.y(j));
  return out;
}

namespace detail {

// Fourth-order stencils along one axis. `at(k)` returns the value at node k
// along the line (already wrapped for periodic axes).
template <class T, class At>
T first_derivative(At&& at, int k, int n, bool periodic, double h) {
  if (periodic || (k >= 2 && k <= n - 3)) {
    auto w = [&](int o) { return at(periodic ? ((k + o) % n + n) % n : k + o); };
    return (w(-2) - 8.0 * w(-1) + 8.0 * w(1) - w(2)) * (1.0 / (12.0 * h));
  }
  if (k == 0) return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) * (1.0 / (12.0 * h));
  if (k == 1) return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) * (1.0 / (12.0 * h));
  if (k == n - 1)
    return (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) + 3.0 * at(n - 5)) *
           (1.0 / (12.0 * h));
  return (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) - at(n - 5)) * (1.0 / (12.0 * h));
}

template <class T, class At>
T second_derivative(At&& at, int k, int n, bool periodic, double h) {
  const double s = 1.0 / (12.0 * h * h);
  if (periodic || (k >= 2 && k <= n - 3)) {
    auto w = [&](int o) { return at(periodic ? ((k + o) % n + n) % n : k + o); };
    return (-1.0 * w(-2) + 16.0 * w(-1) - 30.0 * w(0) + 16.0 * w(1) - w(2)) * s;
  }
  if (k == 0) return (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5)) * s;
  if (k == 1) return (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5)) * s;
  if (k == n - 1)
    return (45.0 * at(n - 1) - 154.0 * at(n - 2) + 214.0 * at(n - 3) - 156.0 * at(n - 4) + 61.0 * at(n - 5) -
            10.0 * at(n - 6)) * s;
  return (10.0 * at(n - 1) - 15.0 * at(n - 2) - 4.0 * at(n - 3) + 14.0 * at(n - 4) - 6.0 * at(n - 5) + at(n - 6)) * s;
}

inline void require_nodes(int n, bool periodic, int need, const char* axis) {
  if (n < need && !periodic)
    throw StencilError(std::string("grid too small for fourth-order stencil along ") + axis + ": " +
                       std::to_string(n) + " < " + std::to_string(need) + " nodes");
  if (periodic && n < 5)
    throw StencilError(std::string("periodic axis ") + axis + " needs at least 5 nodes");
}

}  // namespace detail

template <class T>
Field<T> d_dx(const Field<T>& f) {
  const auto& g = f.grid;
  detail::require_nodes(g.nx, g.periodic_x, 5, "x");
  Field<T> out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = detail::first_derivative<T>([&](int k) -> const T& { return f(k, j); }, i, g.nx, g.periodic_x, g.h);
  return out;
}

template <class T>
Field<T> d_dy(const Field<T>& f) {
  const auto& g = f.grid;
  detail::require_nodes(g.ny, g.periodic_y, 5, "y");
  Field<T> out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = detail::first_derivative<T>([&](int k) -> const T& { return f(i, k); }, j, g.ny, g.periodic_y, g.h);
  return out;
}

template <class T>
Field<T> d_dxx(const Field<T>& f) {
  const auto& g = f.grid;
  detail::require_nodes(g.nx, g.periodic_x, 6, "x");
  Field<T> out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = detail::second_derivative<T>([&](int k) -> const T& { return f(k, j); }, i, g.nx, g.periodic_x, g.h);
  return out;
}

template <class T>
Field<T> d_dyy(const Field<T>& f) {
  const auto& g = f.grid;
  detail::require_nodes(g.ny, g.periodic_y, 6, "y");
  Field<T> out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = detail::second_derivative<T>([&](int k) -> const T& { return f(i, k); }, j, g.ny, g.periodic_y, g.h);
  return out;
}

/// Euclidean Laplacian ∂xx + ∂yy with fourth-order stencils.
template <class T>
Field<T> laplacian4(const Field<T>& f) {
  Field<T> a = d_dxx(f);
  const Field<T> b = d_dyy(f);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = a[k] + b[k];
  return a;
}

/// (∂_z f, ∂_z̄ f) with ∂_z = (∂_x − i∂_y)/2 and ∂_z̄ = (∂_x + i∂_y)/2.
std::pair<ComplexField, ComplexField> complex_derivatives(const ComplexField& f);
std::pair<ComplexField, ComplexField> complex_derivatives(const ScalarField& f);

ComplexField to_complex(const ScalarField& f);

}  // namespace prodsurf
