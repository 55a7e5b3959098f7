#pragma once

// Method-of-lines integration of du/dt = v / F(h_check) on the periodic grid,
// with classical RK4 in time, step rejection by halving, invariant monitoring,
// and optional material trajectories dx^i/dt = vt sigma^{ij} u_j / F.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ifcf/arw_model.hpp"
#include "ifcf/curvature.hpp"
#include "ifcf/grid.hpp"
#include "ifcf/hypersurface.hpp"
#include "ifcf/trace.hpp"

namespace ifcf {

using Point = std::array<double, 2>;

struct FlowConfig {
  double t_max = 10.0;
  double u_floor = -1e-3;  // stop once max u exceeds this
  double cfl = 0.2;
  double dt_min = 1e-8;
  double dt_max = 1e-2;
  std::size_t record_every = 10;
  std::size_t snapshot_every = 0;  // 0: initial and final state only
  double far_future_threshold = -0.1;
  bool trajectory_tracking = false;
  std::vector<Point> seeds;
  double seed_offset = 1e-2;
  std::vector<double> checkpoints;  // times the integrator must land on exactly
  int max_halvings = 10;
  double inf_F_drift = 1e-6;  // tolerated decrease of inf F per unit time
};

struct FlowProblem {
  Grid grid;
  ArwModel model;
  CurvatureFunction cf;
};

/// du/dt = v / F at every grid point. Throws NotConvex if some F <= 0.
Field rhs(const GraphState& state);

/// dx^i/dt = vt sigma^{ij} u_j / F as one field per component.
std::vector<Field> trajectory_velocity(const GraphState& state);

/// cfl dx^2 / max(vt F^{-2} tr F^{ij}), clamped to [dt_min, dt_max].
double adaptive_dt(const GraphState& state, double cfl, double dt_min = 1e-8, double dt_max = 1e-2);

/// One RK4 step; every stage re-assembles the geometry. When positions is not
/// null the material points are advanced with the same stages.
GraphState step(const GraphState& state, double dt, const FlowProblem& problem,
                std::vector<Point>* positions = nullptr);

/// Scalar summary of a state (umbilicality, rescaled metric, speeds, bands).
FlowRecord summarize(const GraphState& state, const ArwConstants& constants, std::size_t step);

Snapshot snapshot(const GraphState& state);

/// t_max - ln(j) / gamma for j = count..1, ascending. These give the uniform
/// transition parameter spacing s_j = -j e^{-gamma t_max} / gamma. Times that
/// would fall at or before t = 0 are dropped.
std::vector<double> transition_checkpoints(double t_max, double gamma, int count = 4);

/// Integrates to t_max or the u_floor. Invalid initial data (far-future
/// precondition, spacelikeness, convexity) throws; failures after the start
/// are recorded in the trace together with the last accepted snapshot.
FlowTrace run(const Field& u0, const FlowProblem& problem, const FlowConfig& config);

/// Offline trajectories over a stored state sequence: RK4 with the velocity
/// field linearly interpolated in time between consecutive states.
std::vector<Trajectory> track_trajectories(std::span<const GraphState> states, std::span<const Point> seeds);

}  // namespace ifcf
