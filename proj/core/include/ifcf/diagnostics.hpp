#pragma once

// Asymptotic measurements on flow states and traces: umbilicality, the
// rescaled-metric limit, exponential rate fits, and the crunch/bang
// transition curve with one-sided derivative matching up to order three.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifcf/arw_model.hpp"
#include "ifcf/hypersurface.hpp"
#include "ifcf/trace.hpp"

namespace ifcf {

// ---- state-level -----------------------------------------------------------

struct UmbilicalityNorms {
  double scaled = 0.0;  // max over grid of F^{-1} |h^j_i - H/n delta|
  double breve = 0.0;   // max over grid of |breve h^j_i - breve H/n delta|
};

/// Norm is the largest absolute eigenvalue of the trace-free mixed operator.
/// Breve quantities use e^{psi_tilde} breve h = h + psi_tilde_alpha nu^alpha delta,
/// so the trace-free parts differ by the factor e^{-psi_tilde}.
UmbilicalityNorms umbilicality(const GraphState& state);

/// (gt^2 m)^{1/gt} (-u_tilde)^{2/gt} sigma_bar, sigma_bar = identity.
Matrix rescaled_metric_limit(const ArwConstants& constants, double u_tilde);

/// max over grid of |e^{2t/n} breve g_ij - rescaled_metric_limit(u e^{gamma t})|,
/// breve g_ij = e^{2 psi_tilde} (sigma_ij - u_i u_j).
double rescaled_metric_deviation(const GraphState& state, const ArwConstants& constants);

// ---- rate fits ---------------------------------------------------------------

struct RateFit {
  double lambda = 0.0;     // value ~ C e^{-lambda t}
  double intercept = 0.0;  // ln C
  double t_start = 0.0;
  double t_end = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
};

/// Least squares on (t, ln value) over t in [t_start, t_end].
/// Throws InsufficientRange with fewer than 10 samples, NonPositiveSeries on values <= 0.
RateFit fit_rate(std::span<const double> t, std::span<const double> values, double t_start, double t_end);

struct DiagnosticsConfig {
  double window_start = 0.5;  // fractions of the final record time
  double window_end = 1.0;
  double rate_factor = 0.8;   // accepted fraction of the predicted exponent
  double c3_constant = 10.0;
};

struct RescaledGraphSummary {
  double min_u_tilde = 0.0;  // over the whole run
  double max_u_tilde = 0.0;
  double window_min_u_tilde = 0.0;  // over the fit window
  double window_max_u_tilde = 0.0;
  double initial_spread = 0.0;  // max - min of u_tilde at the first record
  double final_spread = 0.0;
  std::optional<RateFit> du_tilde_rate;  // empty when the series vanishes (homogeneous data)
};

RescaledGraphSummary rescaled_graph(const FlowTrace& trace, const DiagnosticsConfig& config = {});

/// Everything the report subcommand writes to rates.json.
struct AsymptoticReport {
  double gamma = 0.0;
  double breve_predicted = 0.0;  // (n + omega - 4) / (2n)
  double window_start = 0.0;
  double window_end = 0.0;
  RescaledGraphSummary u_tilde;
  // Rates are empty when the series is identically zero (homogeneous data).
  std::optional<RateFit> du_rate;             // max |Du|_sigma, predicted gamma
  std::optional<RateFit> vt_rate;             // max vt - 1, predicted 2 gamma
  std::optional<RateFit> umbilic_rate;        // predicted 2 gamma
  std::optional<RateFit> umbilic_breve_rate;  // predicted (n + omega - 4) / (2n)
  std::optional<RateFit> speed_rate;          // predicted 2 gamma
  double F_band_low = 0.0;  // of F e^{-gamma t} over the window
  double F_band_high = 0.0;
  double F_band_ratio = 0.0;
  double final_kappa_deviation = 0.0;
  double final_metric_deviation = 0.0;
  bool metric_deviation_monotone = false;  // non-increasing over the window
};

AsymptoticReport analyze_trace(const FlowTrace& trace, const DiagnosticsConfig& config = {});

// ---- transition --------------------------------------------------------------

/// y(s, xi) for one seed on both sides of s = 0 (s ascending, 0 excluded).
/// Left branch: s = -e^{-gamma t}/gamma, y^0 = u(t, x(t, xi)), y^i = x^i(t, xi).
/// Right branch is the mirror: y^0(s) = -y^0(-s), y^i(s) = y^i(-s).
struct SeedCurve {
  std::array<double, 2> seed{};
  std::vector<double> s;
  std::vector<double> y0;
  std::vector<std::array<double, 2>> y;
  bool has_xi_derivatives = false;
  std::vector<std::array<double, 2>> dy0_dxi;                 // d y^0 / d xi^i
  std::vector<std::array<std::array<double, 2>, 2>> dy_dxi;   // [j][i] = d y^j / d xi^i
  std::vector<bool> stencil;  // samples used for the one-sided estimates
};

struct TransitionCurve {
  int n = 2;
  double gamma = 0.5;
  std::vector<SeedCurve> seeds;
};

/// Throws InsufficientRange without trajectories, with fewer than four samples,
/// or if gamma t_final < ln 4.
TransitionCurve build_transition_curve(const FlowTrace& trace);

struct C3Entry {
  std::size_t seed = 0;
  std::string component;  // "y0", "y1", "y2"
  int order = 0;
  double left = 0.0;
  double right = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct C3LimitCheck {
  std::size_t seed = 0;
  std::string name;  // e.g. "dy1/ds -> 0", "dy0/dxi1 -> 0", "dy1/dxi2 converges"
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct C3Report {
  double h_s = 0.0;
  double constant = 10.0;
  std::vector<C3Entry> entries;
  std::vector<C3LimitCheck> limits;
  double y0_linear_residual = 0.0;  // max |y0 - slope s| / max |y0| over all seeds
  bool all_pass = false;

  /// True if every entry of the given order passes.
  [[nodiscard]] bool order_passes(int order) const;
};

/// Derivatives of the cubic through the four stencil samples nearest 0 on each
/// side, evaluated at 0; PASS if |left - right| <= C h_s^{4-k}, h_s = |s_4| / 4.
C3Report c3_report(const TransitionCurve& curve, double constant = 10.0);

/// k-th derivative at 0 of the cubic interpolating (s_i, y_i), i = 0..3.
double cubic_derivative_at_zero(std::span<const double> s, std::span<const double> y, int order);

}  // namespace ifcf
