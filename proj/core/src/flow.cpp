#include "ifcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "ifcf/diagnostics.hpp"
#include "ifcf/errors.hpp"

namespace ifcf {

Field rhs(const GraphState& state) {
  Field out(state.points.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto& pt = state.points[p];
    if (!(pt.F > 0.0)) fail(ErrorKind::NotConvex, fmt::format("F = {} at point {}", pt.F, p));
    out[p] = pt.metric.v / pt.F;
  }
  return out;
}

std::vector<Field> trajectory_velocity(const GraphState& state) {
  const auto n = static_cast<std::size_t>(state.grid.n);
  std::vector<Field> out(n, Field(state.points.size()));
  for (std::size_t p = 0; p < state.points.size(); ++p) {
    const auto& pt = state.points[p];
    const Vector up = pt.sigma_inv * pt.du;
    const double scale = pt.metric.vt / pt.F;
    for (std::size_t k = 0; k < n; ++k) out[k][p] = scale * up(static_cast<Eigen::Index>(k));
  }
  return out;
}

double adaptive_dt(const GraphState& state, double cfl, double dt_min, double dt_max) {
  double coefficient = 0.0;
  for (const auto& pt : state.points) {
    coefficient = std::max(coefficient, pt.metric.vt * pt.F_upper.trace() / (pt.F * pt.F));
  }
  const double dx = state.grid.dx();
  const double dt = coefficient > 0.0 ? cfl * dx * dx / coefficient : dt_max;
  return std::clamp(dt, dt_min, dt_max);
}

namespace {

std::vector<Point> velocity_at(const std::vector<Field>& velocity, const Grid& grid, const std::vector<Point>& x) {
  std::vector<Point> out(x.size(), Point{0.0, 0.0});
  const auto n = static_cast<std::size_t>(grid.n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::span<const double> at(x[i].data(), n);
    for (std::size_t k = 0; k < n; ++k) out[i][k] = interpolate_cubic(velocity[k], grid, at);
  }
  return out;
}

std::vector<Point> advance(const std::vector<Point>& x, const std::vector<Point>& k, double h) {
  std::vector<Point> out(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i][0] += h * k[i][0];
    out[i][1] += h * k[i][1];
  }
  return out;
}

Field axpy(const Field& u, const Field& k, double h) {
  Field out(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = u[p] + h * k[p];
  return out;
}

double metric_residual(const GraphState& state) {
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(state.grid.n);
  for (const auto& pt : state.points) {
    worst = std::max(worst, (pt.metric.g_inv * pt.metric.g - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

GraphState step(const GraphState& state, double dt, const FlowProblem& problem, std::vector<Point>* positions) {
  if (dt == 0.0) return state;
  const auto& grid = problem.grid;
  const double t = state.t;
  const bool track = positions != nullptr && !positions->empty();

  const Field k1 = rhs(state);
  std::vector<Point> x1;
  std::vector<Point> v1;
  if (track) {
    x1 = *positions;
    v1 = velocity_at(trajectory_velocity(state), grid, x1);
  }

  const GraphState s2 = assemble_geometry(axpy(state.u, k1, 0.5 * dt), t + 0.5 * dt, grid, problem.model, problem.cf);
  const Field k2 = rhs(s2);
  std::vector<Point> x2;
  std::vector<Point> v2;
  if (track) {
    x2 = advance(x1, v1, 0.5 * dt);
    v2 = velocity_at(trajectory_velocity(s2), grid, x2);
  }

  const GraphState s3 = assemble_geometry(axpy(state.u, k2, 0.5 * dt), t + 0.5 * dt, grid, problem.model, problem.cf);
  const Field k3 = rhs(s3);
  std::vector<Point> x3;
  std::vector<Point> v3;
  if (track) {
    x3 = advance(x1, v2, 0.5 * dt);
    v3 = velocity_at(trajectory_velocity(s3), grid, x3);
  }

  const GraphState s4 = assemble_geometry(axpy(state.u, k3, dt), t + dt, grid, problem.model, problem.cf);
  const Field k4 = rhs(s4);
  std::vector<Point> v4;
  if (track) {
    const auto x4 = advance(x1, v3, dt);
    v4 = velocity_at(trajectory_velocity(s4), grid, x4);
  }

  Field next(state.u.size());
  for (std::size_t p = 0; p < next.size(); ++p) {
    next[p] = state.u[p] + dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  }
  auto out = assemble_geometry(std::move(next), t + dt, grid, problem.model, problem.cf);

  if (track) {
    auto& x = *positions;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        x[i][k] += dt / 6.0 * (v1[i][k] + 2.0 * v2[i][k] + 2.0 * v3[i][k] + v4[i][k]);
      }
    }
  }
  return out;
}

FlowRecord summarize(const GraphState& state, const ArwConstants& constants, std::size_t step_index) {
  FlowRecord r;
  r.t = state.t;
  r.step = step_index;
  const double growth = std::exp(constants.gamma * state.t);
  const auto dudt = rhs(state);
  const auto velocity = trajectory_velocity(state);
  const double inf = std::numeric_limits<double>::infinity();
  r.min_u = r.min_u_tilde = r.min_F = r.min_F_scaled = r.min_dudt = inf;
  r.max_u = r.max_u_tilde = -inf;

  for (std::size_t p = 0; p < state.points.size(); ++p) {
    const auto& pt = state.points[p];
    const double u = state.u[p];
    r.min_u = std::min(r.min_u, u);
    r.max_u = std::max(r.max_u, u);
    r.min_u_tilde = std::min(r.min_u_tilde, u * growth);
    r.max_u_tilde = std::max(r.max_u_tilde, u * growth);
    r.max_du_tilde_dt = std::max(r.max_du_tilde_dt, std::abs(growth * (dudt[p] + constants.gamma * u)));
    r.min_F = std::min(r.min_F, pt.F);
    r.min_F_scaled = std::min(r.min_F_scaled, pt.F / growth);
    r.max_F_scaled = std::max(r.max_F_scaled, pt.F / growth);
    r.min_dudt = std::min(r.min_dudt, dudt[p]);
    r.max_vt = std::max(r.max_vt, pt.metric.vt);
    r.max_du_sigma = std::max(r.max_du_sigma, std::sqrt(pt.metric.du_sigma2));
    for (Eigen::Index i = 0; i < pt.kappa.size(); ++i) {
      r.max_kappa_deviation =
          std::max(r.max_kappa_deviation, std::abs(pt.kappa(i) * std::abs(u) - 1.0 / constants.gamma_tilde));
    }
    double speed2 = 0.0;
    for (const auto& component : velocity) speed2 += component[p] * component[p];
    r.max_speed = std::max(r.max_speed, std::sqrt(speed2));
  }
  const auto umb = umbilicality(state);
  r.umbilic = umb.scaled;
  r.umbilic_breve = umb.breve;
  r.metric_deviation = rescaled_metric_deviation(state, constants);
  return r;
}

Snapshot snapshot(const GraphState& state) {
  Snapshot s;
  s.t = state.t;
  s.u = state.u;
  const auto size = state.points.size();
  s.v.resize(size);
  s.kappa1.resize(size);
  s.F.resize(size);
  if (state.grid.n >= 2) s.kappa2.resize(size);
  for (std::size_t p = 0; p < size; ++p) {
    const auto& pt = state.points[p];
    s.v[p] = pt.metric.v;
    s.kappa1[p] = pt.kappa(0);
    if (state.grid.n >= 2) s.kappa2[p] = pt.kappa(1);
    s.F[p] = pt.F;
  }
  return s;
}

std::vector<double> transition_checkpoints(double t_max, double gamma, int count) {
  if (count < 1 || !(gamma > 0.0)) fail(ErrorKind::Config, "checkpoints need count >= 1 and gamma > 0");
  std::vector<double> out;
  for (int j = count; j >= 1; --j) {
    const double t = t_max - std::log(static_cast<double>(j)) / gamma;
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

namespace {

std::vector<Trajectory> make_trajectories(const std::vector<Point>& seeds, int n, double offset) {
  std::vector<Trajectory> out;
  for (std::size_t b = 0; b < seeds.size(); ++b) {
    Trajectory base;
    base.base = b;
    base.start = seeds[b];
    out.push_back(base);
    if (offset <= 0.0) continue;
    for (int axis = 0; axis < n; ++axis) {
      for (int sign : {1, -1}) {
        Trajectory tr;
        tr.base = b;
        tr.axis = axis;
        tr.sign = sign;
        tr.start = seeds[b];
        tr.start[static_cast<std::size_t>(axis)] += sign * offset;
        out.push_back(tr);
      }
    }
  }
  return out;
}

void sample_trajectories(std::vector<Trajectory>& trajectories, const std::vector<Point>& positions,
                         const GraphState& state) {
  const auto n = static_cast<std::size_t>(state.grid.n);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    trajectories[i].x.push_back(positions[i]);
    trajectories[i].y0.push_back(
        interpolate_cubic(state.u, state.grid, std::span<const double>(positions[i].data(), n)));
  }
}

double min_F(const GraphState& state) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& pt : state.points) out = std::min(out, pt.F);
  return out;
}

double min_kappa(const GraphState& state) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& pt : state.points) out = std::min(out, pt.kappa(0));
  return out;
}

double max_du_sigma2(const GraphState& state) {
  double out = 0.0;
  for (const auto& pt : state.points) out = std::max(out, pt.metric.du_sigma2);
  return out;
}

}  // namespace

FlowTrace run(const Field& u0, const FlowProblem& problem, const FlowConfig& config) {
  const auto& constants = problem.model.constants;
  if (u0.size() != problem.grid.size()) {
    fail(ErrorKind::Domain, fmt::format("initial field has {} values, grid has {}", u0.size(), problem.grid.size()));
  }
  const auto [lo, hi] = std::minmax_element(u0.begin(), u0.end());
  if (!(*lo > config.far_future_threshold) || !(*hi < 0.0)) {
    fail(ErrorKind::Domain, fmt::format("initial data must lie in ({}, 0); got [{}, {}]", config.far_future_threshold,
                                        *lo, *hi));
  }
  if (!(config.t_max > 0.0) || !(config.cfl > 0.0) || config.cfl > 1.0 || config.record_every == 0) {
    fail(ErrorKind::Config, "t_max > 0, cfl in (0, 1] and record_every >= 1 are required");
  }

  FlowTrace trace;
  trace.header.n = constants.n;
  trace.header.N = problem.grid.N;
  trace.header.omega = constants.omega;
  trace.header.m = constants.m;
  trace.header.a = constants.a;
  trace.header.gamma_tilde = constants.gamma_tilde;
  trace.header.gamma = constants.gamma;
  trace.header.curvature = std::string(to_string(problem.cf.kind()));
  trace.header.t_max = config.t_max;

  GraphState state = assemble_geometry(u0, 0.0, problem.grid, problem.model, problem.cf);

  std::vector<double> checkpoints = config.checkpoints;
  std::vector<Point> positions;
  if (config.trajectory_tracking && !config.seeds.empty()) {
    if (checkpoints.empty()) checkpoints = transition_checkpoints(config.t_max, constants.gamma, 4);
    trace.trajectories = make_trajectories(config.seeds, constants.n, config.seed_offset);
    trace.header.seed_offset = config.seed_offset;
    for (const auto& tr : trace.trajectories) positions.push_back(tr.start);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_checkpoint = 0;
  while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= 0.0) ++next_checkpoint;

  auto& log = trace.invariants;
  log.initial_min_F = min_F(state);
  log.min_kappa = min_kappa(state);
  log.max_du_sigma2 = max_du_sigma2(state);
  log.max_metric_residual = metric_residual(state);
  log.min_dudt = std::numeric_limits<double>::infinity();

  auto record = [&](const GraphState& s, std::size_t index, bool is_checkpoint) {
    auto r = summarize(s, constants, index);
    r.checkpoint = is_checkpoint;
    log.min_dudt = std::min(log.min_dudt, r.min_dudt);
    trace.records.push_back(r);
    if (!positions.empty()) sample_trajectories(trace.trajectories, positions, s);
  };

  record(state, 0, false);
  trace.snapshots.push_back(snapshot(state));

  std::size_t steps = 0;
  bool recorded_last = true;
  const double t_eps = 1e-12 * std::max(1.0, config.t_max);
  while (true) {
    if (state.t >= config.t_max - t_eps) {
      trace.stop_reason = "t_max";
      break;
    }
    double dt = adaptive_dt(state, config.cfl, config.dt_min, config.dt_max);
    double target = config.t_max;
    bool hits_checkpoint = false;
    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= target + t_eps) {
      target = checkpoints[next_checkpoint];
      hits_checkpoint = true;
    }
    if (state.t + dt >= target - t_eps) {
      dt = target - state.t;
    } else {
      hits_checkpoint = false;
    }

    std::optional<GraphState> next;
    std::vector<Point> moved;
    std::string last_error;
    for (int attempt = 0; attempt <= config.max_halvings; ++attempt) {
      moved = positions;
      try {
        next = step(state, dt, problem, &moved);
        break;
      } catch (const Error& e) {
        last_error = e.what();
        ++log.rejected_steps;
        dt *= 0.5;
        hits_checkpoint = false;
      }
    }
    if (!next) {
      trace.failure = FlowFailure{ErrorKind::Stiffness,
                                  fmt::format("step at t = {} rejected after {} halvings: {}", state.t,
                                              config.max_halvings, last_error)};
      trace.failure_snapshot = snapshot(state);
      trace.stop_reason = "failure";
      break;
    }

    const double step_dt = next->t - state.t;
    for (std::size_t p = 0; p < state.u.size(); ++p) {
      if (!(next->u[p] > state.u[p])) {
        ++log.monotonicity_violations;
        break;
      }
    }
    const double previous_min_F = min_F(state);
    const double current_min_F = min_F(*next);
    log.min_F_drop = std::max(log.min_F_drop, previous_min_F - current_min_F);
    if (current_min_F < previous_min_F - config.inf_F_drift * step_dt) ++log.inf_F_violations;
    log.min_kappa = std::min(log.min_kappa, min_kappa(*next));
    log.max_du_sigma2 = std::max(log.max_du_sigma2, max_du_sigma2(*next));
    log.max_metric_residual = std::max(log.max_metric_residual, metric_residual(*next));

    state = std::move(*next);
    positions = std::move(moved);
    ++steps;
    ++log.accepted_steps;
    if (hits_checkpoint) {
      state.t = checkpoints[next_checkpoint];
      ++next_checkpoint;
    }

    const double max_u = *std::max_element(state.u.begin(), state.u.end());
    const bool at_end = state.t >= config.t_max - t_eps || max_u > config.u_floor;
    recorded_last = hits_checkpoint || at_end || steps % config.record_every == 0;
    if (recorded_last) record(state, steps, hits_checkpoint);
    if (config.snapshot_every > 0 && steps % config.snapshot_every == 0) trace.snapshots.push_back(snapshot(state));
    if (max_u > config.u_floor) {
      trace.stop_reason = "u_floor";
      break;
    }
  }
  if (!recorded_last) record(state, steps, false);
  if (trace.snapshots.back().t != state.t) trace.snapshots.push_back(snapshot(state));
  if (trace.invariants.min_dudt == std::numeric_limits<double>::infinity()) trace.invariants.min_dudt = 0.0;
  return trace;
}

std::vector<Trajectory> track_trajectories(std::span<const GraphState> states, std::span<const Point> seeds) {
  if (states.empty()) return {};
  const auto& grid = states.front().grid;
  std::vector<Trajectory> out;
  std::vector<Point> x;
  for (std::size_t b = 0; b < seeds.size(); ++b) {
    Trajectory tr;
    tr.base = b;
    tr.start = seeds[b];
    out.push_back(tr);
    x.push_back(seeds[b]);
  }
  auto sample = [&](const GraphState& s) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].x.push_back(x[i]);
      out[i].y0.push_back(
          interpolate_cubic(s.u, grid, std::span<const double>(x[i].data(), static_cast<std::size_t>(grid.n))));
    }
  };
  sample(states.front());
  auto field = trajectory_velocity(states.front());
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double dt = states[k].t - states[k - 1].t;
    auto next_field = trajectory_velocity(states[k]);
    std::vector<Field> mid(field.size(), Field(field.front().size()));
    for (std::size_t c = 0; c < field.size(); ++c) {
      for (std::size_t p = 0; p < field[c].size(); ++p) mid[c][p] = 0.5 * (field[c][p] + next_field[c][p]);
    }
    const auto v1 = velocity_at(field, grid, x);
    const auto v2 = velocity_at(mid, grid, advance(x, v1, 0.5 * dt));
    const auto v3 = velocity_at(mid, grid, advance(x, v2, 0.5 * dt));
    const auto v4 = velocity_at(next_field, grid, advance(x, v3, dt));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t c = 0; c < 2; ++c) x[i][c] += dt / 6.0 * (v1[i][c] + 2.0 * v2[i][c] + 2.0 * v3[i][c] + v4[i][c]);
    }
    sample(states[k]);
    field = std::move(next_field);
  }
  return out;
}

}  // namespace ifcf
