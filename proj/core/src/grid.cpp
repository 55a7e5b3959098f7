#include "ifcf/grid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {

Grid Grid::make(int n, int N) {
  if (n != 1 && n != 2) fail(ErrorKind::Config, fmt::format("grid.n must be 1 or 2, got {}", n));
  if (N < 16) fail(ErrorKind::Config, fmt::format("grid.N must be >= 16, got {}", N));
  return Grid{n, N};
}

double Grid::dx() const noexcept { return 2.0 * std::numbers::pi / N; }

std::size_t Grid::size() const noexcept {
  return n == 2 ? static_cast<std::size_t>(N) * N : static_cast<std::size_t>(N);
}

std::array<double, 2> Grid::coords(std::size_t idx) const noexcept {
  const auto i = static_cast<int>(idx % static_cast<std::size_t>(N));
  const auto j = static_cast<int>(idx / static_cast<std::size_t>(N));
  return {i * dx(), n == 2 ? j * dx() : 0.0};
}

namespace {

template <typename Stencil>
Field apply_along(const Field& u, const Grid& grid, int axis, Stencil&& stencil) {
  Field out(u.size());
  const int rows = grid.n == 2 ? grid.N : 1;
  const int N = grid.N;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < N; ++i) {
      auto at = [&](int offset) {
        const int ii = axis == 0 ? (i + offset + N) % N : i;
        const int jj = axis == 0 ? j : (j + offset + N) % N;
        return u[static_cast<std::size_t>(ii) + static_cast<std::size_t>(N) * static_cast<std::size_t>(jj)];
      };
      out[static_cast<std::size_t>(i) + static_cast<std::size_t>(N) * static_cast<std::size_t>(j)] = stencil(at);
    }
  }
  return out;
}

}  // namespace

Field derivative(const Field& u, const Grid& grid, int axis) {
  const double scale = 1.0 / (12.0 * grid.dx());
  return apply_along(u, grid, axis, [scale](auto at) {
    return scale * (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2));
  });
}

Field second_derivative(const Field& u, const Grid& grid, int axis) {
  const double h = grid.dx();
  const double scale = 1.0 / (12.0 * h * h);
  return apply_along(u, grid, axis, [scale](auto at) {
    return scale * (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2));
  });
}

SpatialDerivatives spatial_derivatives(const Field& u, const Grid& grid) {
  const int n = grid.n;
  SpatialDerivatives d;
  d.first.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) d.first.push_back(derivative(u, grid, k));
  d.second.resize(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k) {
    d.second[static_cast<std::size_t>(k * n + k)] = second_derivative(u, grid, k);
  }
  if (n == 2) {
    d.second[1] = derivative(d.first[0], grid, 1);
    d.second[2] = d.second[1];
  }
  return d;
}

namespace {

std::array<double, 4> cubic_weights(double f) {
  return {-f * (f - 1.0) * (f - 2.0) / 6.0, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
          -(f + 1.0) * f * (f - 2.0) / 2.0, (f + 1.0) * f * (f - 1.0) / 6.0};
}

}  // namespace

double interpolate_cubic(const Field& u, const Grid& grid, std::span<const double> x) {
  const double h = grid.dx();
  const double s0 = x[0] / h;
  const int i0 = static_cast<int>(std::floor(s0));
  const auto w0 = cubic_weights(s0 - i0);
  if (grid.n == 1) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) acc += w0[static_cast<std::size_t>(a)] * u[grid.index(i0 - 1 + a)];
    return acc;
  }
  const double s1 = x[1] / h;
  const int j0 = static_cast<int>(std::floor(s1));
  const auto w1 = cubic_weights(s1 - j0);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += w0[static_cast<std::size_t>(a)] * u[grid.index(i0 - 1 + a, j0 - 1 + b)];
    acc += w1[static_cast<std::size_t>(b)] * row;
  }
  return acc;
}

}  // namespace ifcf
