#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ifcf/errors.hpp"

namespace ifcf {

/// Scalar summary of one recorded flow state.
struct FlowRecord {
  double t = 0.0;
  std::size_t step = 0;
  bool checkpoint = false;

  double min_u = 0.0;
  double max_u = 0.0;
  double min_u_tilde = 0.0;  // u e^{gamma t}
  double max_u_tilde = 0.0;
  double max_du_tilde_dt = 0.0;

  double min_F = 0.0;
  double min_F_scaled = 0.0;  // F e^{-gamma t}
  double max_F_scaled = 0.0;
  double min_dudt = 0.0;

  double max_vt = 1.0;
  double max_du_sigma = 0.0;  // sqrt(sigma^{ij} u_i u_j)
  double max_kappa_deviation = 0.0;  // |kappa_i |u| - 1/gamma_tilde|

  double umbilic = 0.0;        // F^{-1} |h - H/n delta|
  double umbilic_breve = 0.0;  // |breve h - breve H/n delta|
  double metric_deviation = 0.0;
  double max_speed = 0.0;      // |dx^i/dt| of material points
};

/// Full field dump; kappa2 empty for n = 1.
struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> kappa1;
  std::vector<double> kappa2;
  std::vector<double> F;
};

/// Material curve x(t, xi) sampled at every record, with y^0 = u(t, x(t, xi)).
/// Offset trajectories (axis >= 0) start at seed +/- offset along one axis and
/// provide xi-derivatives for the transition analysis.
struct Trajectory {
  std::size_t base = 0;  // index of the base seed
  int axis = -1;         // -1 for the base trajectory
  int sign = 0;
  std::array<double, 2> start{};
  std::vector<std::array<double, 2>> x;
  std::vector<double> y0;
};

struct TraceHeader {
  int n = 2;
  int N = 64;
  double omega = 2.0;
  double m = 1.0;
  double a = -1.0;
  double gamma_tilde = 1.0;
  double gamma = 0.5;
  std::string curvature;
  std::string model_hash;
  double t_max = 0.0;
  double seed_offset = 0.0;
};

/// Running record of the invariants checked at every accepted step.
struct InvariantLog {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_du_sigma2 = 0.0;
  double min_kappa = 0.0;
  double max_metric_residual = 0.0;
  double min_dudt = 0.0;
  double initial_min_F = 0.0;
  double min_F_drop = 0.0;  // largest decrease of inf F over a step
  std::size_t monotonicity_violations = 0;
  std::size_t inf_F_violations = 0;
};

struct FlowFailure {
  ErrorKind kind = ErrorKind::Stiffness;
  std::string message;
};

struct FlowTrace {
  TraceHeader header;
  std::vector<FlowRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<Trajectory> trajectories;
  InvariantLog invariants;
  std::string stop_reason;
  std::optional<FlowFailure> failure;
  std::optional<Snapshot> failure_snapshot;

  [[nodiscard]] bool ok() const noexcept { return !failure.has_value(); }
};

}  // namespace ifcf
