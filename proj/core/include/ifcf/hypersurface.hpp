#pragma once

// Pointwise geometry of a spacelike graph x^0 = u(x) over the flat torus in the
// conformal ambient metric -(dx^0)^2 + sigma_ij(x^0, x) dx^i dx^j, with the
// past-directed normal nu = -vt (1, sigma^{ij} u_j).

#include <span>
#include <vector>

#include "ifcf/arw_model.hpp"
#include "ifcf/curvature.hpp"
#include "ifcf/grid.hpp"
#include "ifcf/linalg.hpp"

namespace ifcf {

inline constexpr double kSpacelikeMargin = 1e-8;
inline constexpr double kConvexityFloor = 1e-8;
inline constexpr double kMetricInverseTolerance = 1e-10;

struct InducedMetric {
  Matrix g;
  Matrix g_inv;
  double v = 1.0;          // sqrt(1 - |Du|_sigma^2)
  double vt = 1.0;         // 1 / v
  double du_sigma2 = 0.0;  // sigma^{ij} u_i u_j
};

/// g_ij = sigma_ij - u_i u_j, g^{ij} = sigma^{ij} + u^i u^j / v^2.
/// Throws NotSpacelike if |Du|_sigma^2 >= 1 - kSpacelikeMargin.
InducedMetric induced_metric(const Vector& du, const Matrix& sigma);

struct PointGeometry {
  Vector du;  // partial derivatives u_,i
  Matrix sigma;
  Matrix sigma_inv;
  Matrix sigma_dot;
  InducedMetric metric;
  double f_prime = 0.0;
  double psi_tilde = 0.0;  // f(u) + psi(u, x)
  double psi_nu = 0.0;     // psi_alpha nu^alpha
  Matrix hessian;          // covariant Hessian u_;ij w.r.t. g
  Matrix h;                // covariant second fundamental form h_ij
  Matrix h_check;          // mixed shifted shape operator, h_check(j, i) = h^j_i
  Vector kappa;            // eigenvalues of h_check, ascending
  double F = 0.0;          // F(h_check)
  Matrix F_upper;          // F^{ij}
};

struct GraphState {
  double t = 0.0;
  Grid grid;
  Field u;
  std::vector<PointGeometry> points;
};

/// Fills hessian and h for every point. Requires du, sigma_dot and metric
/// already set. Christoffel symbols of g come from differencing g_ij on the grid:
///   u_;ij = u_,ij - Gamma^k_ij u_k,   h_ij = v (-u_;ij - sigma_dot_ij / 2).
void second_fundamental_form(const Grid& grid, const SpatialDerivatives& derivs,
                             std::span<PointGeometry> points);

/// h_check^j_i = g^{jk} h_ki - vt f' delta^j_i + psi_nu delta^j_i.
Matrix shifted_shape_operator(const Matrix& h, const Matrix& g_inv, double f_prime, double vt,
                              double psi_nu);

/// Real eigenvalues of a mixed operator, ascending. Throws ComplexSpectrum if
/// the imaginary residual exceeds 1e-9 (relative to the operator scale).
Vector principal_curvatures(const Matrix& mixed);

/// Full geometry cache; throws Domain, NotSpacelike, NotConvex, OutsideCone,
/// ComplexSpectrum.
GraphState assemble_geometry(Field u, double t, const Grid& grid, const ArwModel& model,
                             const CurvatureFunction& cf);

}  // namespace ifcf
