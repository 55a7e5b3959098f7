#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ifcf {

using Field = std::vector<double>;

/// Uniform periodic grid on the flat n-torus [0, 2pi)^n, n in {1, 2}.
/// Linear index i + N j with i along x^1.
struct Grid {
  int n = 2;
  int N = 64;

  /// Throws Config unless n in {1, 2} and N >= 16.
  static Grid make(int n, int N);

  [[nodiscard]] double dx() const noexcept;
  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] int wrap(int i) const noexcept { return ((i % N) + N) % N; }
  [[nodiscard]] std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(wrap(i)) + (n == 2 ? static_cast<std::size_t>(N) * wrap(j) : 0);
  }
  [[nodiscard]] std::array<double, 2> coords(std::size_t idx) const noexcept;
};

struct SpatialDerivatives {
  std::vector<Field> first;   // u_,k
  std::vector<Field> second;  // u_,kl at [k * n + l]
};

/// Fourth-order central difference along one axis.
Field derivative(const Field& u, const Grid& grid, int axis);
/// Fourth-order central second difference along one axis.
Field second_derivative(const Field& u, const Grid& grid, int axis);

/// First and second partial derivatives; mixed terms as two first differences.
SpatialDerivatives spatial_derivatives(const Field& u, const Grid& grid);

/// Periodic tensor-product cubic Lagrange interpolation.
double interpolate_cubic(const Field& u, const Grid& grid, std::span<const double> x);

template <typename Fn>
Field sample_field(const Grid& grid, Fn&& fn) {
  Field out(grid.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto c = grid.coords(idx);
    out[idx] = fn(std::span<const double>(c.data(), static_cast<std::size_t>(grid.n)));
  }
  return out;
}

}  // namespace ifcf
