#include "ifcf/hypersurface.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {

InducedMetric induced_metric(const Vector& du, const Matrix& sigma) {
  InducedMetric out;
  const Matrix sigma_inv = spd_inverse(sigma);
  const Vector du_up = sigma_inv * du;
  out.du_sigma2 = du.dot(du_up);
  if (!(out.du_sigma2 < 1.0 - kSpacelikeMargin)) {
    fail(ErrorKind::NotSpacelike, fmt::format("|Du|^2 = {} is not below 1 - {}", out.du_sigma2, kSpacelikeMargin));
  }
  const double v2 = 1.0 - out.du_sigma2;
  out.v = std::sqrt(v2);
  out.vt = 1.0 / out.v;
  out.g = sigma - du * du.transpose();
  out.g_inv = sigma_inv + (du_up * du_up.transpose()) / v2;
  return out;
}

void second_fundamental_form(const Grid& grid, const SpatialDerivatives& derivs,
                             std::span<PointGeometry> points) {
  const int n = grid.n;
  const auto size = points.size();

  // dg[k][i * n + j] = d_k g_ij
  std::vector<std::vector<Field>> dg(static_cast<std::size_t>(n),
                                     std::vector<Field>(static_cast<std::size_t>(n * n)));
  Field component(size);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (std::size_t p = 0; p < size; ++p) component[p] = points[p].metric.g(i, j);
      for (int k = 0; k < n; ++k) {
        auto d = derivative(component, grid, k);
        dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(j * n + i)] = d;
        dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i * n + j)] = std::move(d);
      }
    }
  }

  for (std::size_t p = 0; p < size; ++p) {
    auto& pt = points[p];
    auto dgk = [&](int k, int i, int j) {
      return dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i * n + j)][p];
    };
    // Gamma_{l,ij} (first kind), contracted with u^l = g^{lm} u_m below.
    const Vector du_up = pt.metric.g_inv * pt.du;
    pt.hessian.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double gamma_u = 0.0;
        for (int l = 0; l < n; ++l) {
          const double first_kind = 0.5 * (dgk(i, l, j) + dgk(j, l, i) - dgk(l, i, j));
          gamma_u += first_kind * du_up(l);
        }
        const double second = derivs.second[static_cast<std::size_t>(i * n + j)][p];
        pt.hessian(i, j) = second - gamma_u;
        pt.hessian(j, i) = pt.hessian(i, j);
      }
    }
    pt.h = pt.metric.v * (-pt.hessian - 0.5 * pt.sigma_dot);
    pt.h = 0.5 * (pt.h + pt.h.transpose()).eval();
  }
}

Matrix shifted_shape_operator(const Matrix& h, const Matrix& g_inv, double f_prime, double vt,
                              double psi_nu) {
  const auto n = h.rows();
  return g_inv * h + (-vt * f_prime + psi_nu) * Matrix::Identity(n, n);
}

Vector principal_curvatures(const Matrix& mixed) {
  const auto n = mixed.rows();
  Vector kappa(n);
  if (n == 1) {
    kappa(0) = mixed(0, 0);
    return kappa;
  }
  const double scale = std::max(1.0, mixed.cwiseAbs().maxCoeff());
  if (n == 2) {
    // (tr/2)^2 - det rewritten without the cancellation that would otherwise
    // leave a spurious imaginary part of order sqrt(eps) near umbilic points.
    const double half_trace = 0.5 * mixed.trace();
    const double half_diff = 0.5 * (mixed(0, 0) - mixed(1, 1));
    double disc = half_diff * half_diff + mixed(0, 1) * mixed(1, 0);
    if (disc < 0.0) {
      if (std::sqrt(-disc) > 1e-9 * scale) {
        fail(ErrorKind::ComplexSpectrum, fmt::format("imaginary part {} in shape operator spectrum", std::sqrt(-disc)));
      }
      disc = 0.0;
    }
    const double root = std::sqrt(disc);
    kappa(0) = half_trace - root;
    kappa(1) = half_trace + root;
    return kappa;
  }
  Eigen::EigenSolver<Matrix> solver(mixed, false);
  const auto values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(values(i).imag()) > 1e-9 * scale) {
      fail(ErrorKind::ComplexSpectrum, fmt::format("imaginary part {} in shape operator spectrum", values(i).imag()));
    }
    kappa(i) = values(i).real();
  }
  std::sort(kappa.begin(), kappa.end());
  return kappa;
}

GraphState assemble_geometry(Field u, double t, const Grid& grid, const ArwModel& model,
                             const CurvatureFunction& cf) {
  const int n = grid.n;
  if (model.constants.n != n || cf.dimension() != n) {
    fail(ErrorKind::Config, fmt::format("dimension mismatch: grid {}, model {}, curvature {}", n,
                                        model.constants.n, cf.dimension()));
  }
  GraphState state;
  state.t = t;
  state.grid = grid;
  state.u = std::move(u);
  const auto size = grid.size();
  state.points.resize(size);

  const auto derivs = spatial_derivatives(state.u, grid);
  for (std::size_t p = 0; p < size; ++p) {
    auto& pt = state.points[p];
    const double tau = state.u[p];
    const auto c = grid.coords(p);
    const std::span<const double> x(c.data(), static_cast<std::size_t>(n));

    pt.du.resize(n);
    for (int k = 0; k < n; ++k) pt.du(k) = derivs.first[static_cast<std::size_t>(k)][p];

    const auto warp = eval_warp(model.warp, tau);
    const auto s = eval_sigma(model.sigma, tau, x);
    const auto psi = eval_psi(model.psi, tau, x);
    pt.sigma = s.sigma;
    pt.sigma_dot = s.sigma_dot;
    pt.metric = induced_metric(pt.du, pt.sigma);
    pt.sigma_inv = spd_inverse(pt.sigma);

    const double residual = (pt.metric.g_inv * pt.metric.g - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (residual > kMetricInverseTolerance) {
      fail(ErrorKind::NotSpacelike, fmt::format("metric inverse residual {} at point {}", residual, p));
    }

    pt.f_prime = warp.df;
    pt.psi_tilde = warp.f + psi.psi;
    const Vector du_up = pt.sigma_inv * pt.du;
    pt.psi_nu = -pt.metric.vt * (psi.psi_tau + psi.psi_x.dot(du_up));
  }

  second_fundamental_form(grid, derivs, state.points);

  for (std::size_t p = 0; p < size; ++p) {
    auto& pt = state.points[p];
    pt.h_check = shifted_shape_operator(pt.h, pt.metric.g_inv, pt.f_prime, pt.metric.vt, pt.psi_nu);
    const Vector kappa = principal_curvatures(pt.h_check);
    if (!(kappa(0) > kConvexityFloor)) {
      fail(ErrorKind::NotConvex, fmt::format("min shifted curvature {} at point {} (t = {})", kappa(0), p, t));
    }
    const auto eval = cf.evaluate(pt.h_check, pt.metric.g);
    pt.kappa = eval.kappa;
    pt.F = eval.value;
    pt.F_upper = eval.tensor_derivative;
  }
  return state;
}

}  // namespace ifcf
