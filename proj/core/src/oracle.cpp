#include "ifcf/oracle.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "ifcf/errors.hpp"
#include "ifcf/hypersurface.hpp"

namespace ifcf {

HomogeneousValues homogeneous_closed_form(double u0, const ArwConstants& constants, double t) {
  if (!(u0 < 0.0)) fail(ErrorKind::Domain, fmt::format("u0 must be negative, got {}", u0));
  const double decay = std::exp(-constants.gamma * t);
  HomogeneousValues out;
  out.u = u0 * decay;
  out.u_tilde = u0;
  out.F = constants.n / (constants.gamma_tilde * std::abs(u0)) / decay;
  return out;
}

namespace {

double slice_curvature_value(const ArwModel& model, const CurvatureFunction& cf, double tau) {
  const std::array<double, 2> origin{0.0, 0.0};
  const Matrix h = slice_shifted_curvature(model, tau, std::span<const double>(origin.data(),
                                                                              static_cast<std::size_t>(model.constants.n)));
  const Vector kappa = principal_curvatures(h);
  if (!(kappa(0) > 0.0)) {
    fail(ErrorKind::ConvexityLost, fmt::format("slice at tau = {} has min curvature {}", tau, kappa(0)));
  }
  return cf.value(kappa);
}

}  // namespace

std::vector<HomogeneousSample> homogeneous_ode(double u0, const ArwModel& model, const CurvatureFunction& cf,
                                               std::span<const double> times, double tolerance) {
  namespace odeint = boost::numeric::odeint;
  if (!(u0 < 0.0)) fail(ErrorKind::Domain, fmt::format("u0 must be negative, got {}", u0));
  if (!model.sigma.is_homogeneous() || model.psi.amplitude != 0.0) {
    fail(ErrorKind::Domain, "homogeneous_ode needs x-independent sigma and psi = 0");
  }
  std::vector<HomogeneousSample> out;
  if (times.empty()) return out;
  if (times.front() < 0.0) fail(ErrorKind::Domain, "sample times must be non-negative");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) fail(ErrorKind::Domain, "sample times must be non-decreasing");
  }
  // The integration always starts from u(0) = u0; a leading 0 is added and
  // dropped again when the first requested time is later.
  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  const bool prepend = times.front() > 0.0;
  if (prepend) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  out.reserve(grid.size());

  // u decays exponentially, so integrate w = ln(-u), dw/dt = 1 / (u F(u)),
  // which keeps the error relative all the way down.
  using State = std::array<double, 1>;
  auto rhs = [&](const State& w, State& dwdt, double /*t*/) {
    const double u = -std::exp(w[0]);
    dwdt[0] = 1.0 / (u * slice_curvature_value(model, cf, u));
  };
  auto observer = [&](const State& w, double t) {
    const double u = -std::exp(w[0]);
    out.push_back({t, u, slice_curvature_value(model, cf, u)});
  };

  State u{std::log(-u0)};
  auto stepper = odeint::make_dense_output(tolerance * 1e-2, tolerance * 1e-2, odeint::runge_kutta_dopri5<State>());
  const double dt0 = 1e-3;
  odeint::integrate_times(stepper, rhs, u, grid.begin(), grid.end(), dt0, observer);
  if (prepend) out.erase(out.begin());
  return out;
}

double transition_closed_form(double u0, const ArwConstants& constants, double s) {
  const double s_max = 1.0 / constants.gamma;
  if (s < -s_max || s > s_max) {
    fail(ErrorKind::Domain, fmt::format("s = {} outside [{}, {}]", s, -s_max, s_max));
  }
  return -constants.gamma * u0 * s;
}

}  // namespace ifcf
