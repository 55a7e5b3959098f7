#pragma once

// Reference solutions for x-independent data. For the exact power-law warp
// with static sigma the flow reduces to du/dt = 1 / (n |f'(u)|) = -gamma u.

#include <span>
#include <vector>

#include "ifcf/arw_model.hpp"
#include "ifcf/curvature.hpp"

namespace ifcf {

struct HomogeneousValues {
  double u = 0.0;
  double u_tilde = 0.0;
  double F = 0.0;
};

/// u = u0 e^{-gamma t}, u_tilde = u0, F = n / (gamma_tilde |u0|) e^{gamma t}.
HomogeneousValues homogeneous_closed_form(double u0, const ArwConstants& constants, double t);

struct HomogeneousSample {
  double t = 0.0;
  double u = 0.0;
  double F = 0.0;
};

/// Integrates du/dt = 1 / F(slice shifted curvature at u) with an adaptive
/// Dormand-Prince scheme and samples at the given (increasing) times.
/// Requires x-independent sigma and psi = 0; throws ConvexityLost if the slice
/// curvature leaves the positive cone.
std::vector<HomogeneousSample> homogeneous_ode(double u0, const ArwModel& model, const CurvatureFunction& cf,
                                               std::span<const double> times, double tolerance = 1e-10);

/// y^0(s) = -gamma u0 s on both sides of the singularity, s in [-1/gamma, 1/gamma].
double transition_closed_form(double u0, const ArwConstants& constants, double s);

}  // namespace ifcf
