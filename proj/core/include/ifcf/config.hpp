#pragma once

// Archival run configuration in INI form. Sections and keys:
//
//   [model]       n, omega, m, a, warp (exact | perturbed | inverse), epsilon,
//                 sigma_perturbation, psi_amplitude
//   [curvature]   kind (mean | gauss_root)
//   [grid]        n, N
//   [initial]     u0_mean, u0_perturbation   u0 = mean (1 + pert prod cos x^i)
//   [flow]        t_max, cfl, u_floor, dt_min, dt_max, record_every, snapshot_every,
//                 far_future, max_halvings, trajectory_tracking, seeds, seed_offset
//   [diagnostics] window_start, window_end, rate_factor, c3_constant
//   [output]      dir
//
// Seeds are written "x1 x2; x1 x2; ...". Every key is optional except
// initial.u0_mean; unknown sections or keys are rejected.

#include <filesystem>
#include <string>
#include <string_view>

#include "ifcf/arw_model.hpp"
#include "ifcf/curvature.hpp"
#include "ifcf/diagnostics.hpp"
#include "ifcf/flow.hpp"
#include "ifcf/grid.hpp"

namespace ifcf {

struct RunConfig {
  ArwModel model;
  CurvatureKind curvature = CurvatureKind::NthRootGauss;
  Grid grid;
  double u0_mean = -0.05;
  double u0_perturbation = 0.0;
  FlowConfig flow;
  DiagnosticsConfig diagnostics;
  std::string output_dir;
  std::string model_hash;  // FNV-1a of the canonical key list, hex

  [[nodiscard]] Field initial_data() const;
  [[nodiscard]] FlowProblem problem() const;
};

/// Throws Config with a message naming the offending key.
RunConfig parse_config(std::string_view text);

/// Throws Io if the file cannot be read, Config if it is invalid.
RunConfig load_config(const std::filesystem::path& path);

/// The fully resolved configuration as INI text with sorted sections and
/// keys. Parsing it back yields the same configuration.
std::string canonical_text(const RunConfig& config);

}  // namespace ifcf
