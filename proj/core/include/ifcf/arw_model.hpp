#pragma once

// ARW model spacetimes in the conformal gauge
//
//   ds^2 = e^{2(f(tau) + psi(tau,x))} { -(dtau)^2 + sigma_ij(tau,x) dx^i dx^j },  a <= tau < 0,
//
// restricted to a closed-form family: a power-law warp f (optionally perturbed),
// a flat torus limit metric perturbed at order tau^2, and a conformal correction
// psi = tau^2 q(x).

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ifcf/linalg.hpp"

namespace ifcf {

struct ArwConstants {
  int n = 2;
  double omega = 2.0;
  double gamma_tilde = 1.0;  // (n + omega - 2) / 2
  double gamma = 0.5;        // gamma_tilde / n
  double m = 1.0;
  double a = -1.0;

  /// Derives gamma_tilde and gamma; throws Config on violated invariants.
  static ArwConstants make(int n, double omega, double m, double a);
};

enum class WarpKind {
  ExactPowerLaw,        // f = ln(-gt sqrt(m) tau) / gt
  Perturbed,            // exact + eps tau^2
  InversePerturbation,  // exact + eps / tau (not ARW; negative control)
};

struct WarpDerivatives {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
  double d3f = 0.0;
  // f'' + gt f'^2 and its tau-derivative in closed form. The exact power law
  // cancels to zero here, which the raw derivatives cannot resolve near tau = 0.
  double shift = 0.0;
  double dshift = 0.0;
};

struct WarpFunction {
  WarpKind kind = WarpKind::ExactPowerLaw;
  ArwConstants constants;
  double epsilon = 0.0;
};

/// Throws Domain unless a <= tau < 0.
WarpDerivatives eval_warp(const WarpFunction& warp, double tau);

/// P(x) = constant + cos_amplitude * cos(x^1).
struct MetricPerturbation {
  Matrix constant;
  Matrix cos_amplitude;
};

/// sigma_ij(tau, x) = delta_ij + tau^2 P_ij(x).
struct SpatialMetricField {
  int n = 2;
  MetricPerturbation perturbation;

  static SpatialMetricField flat(int n);
  /// The single-mode family used by configs: P_11 = amplitude cos x^1.
  static SpatialMetricField single_mode(int n, double amplitude);
  [[nodiscard]] bool is_homogeneous() const;
};

struct SigmaSample {
  Matrix sigma;
  Matrix sigma_dot;                  // d/dtau
  std::array<Matrix, kMaxDim> sigma_x;  // d/dx^k; the first n entries are set
};

/// Throws NotPositiveDefinite if sigma has an eigenvalue <= 0.
SigmaSample eval_sigma(const SpatialMetricField& field, double tau, std::span<const double> x);

/// psi(tau, x) = tau^2 * amplitude * prod_k cos(x^k).
struct ConformalCorrection {
  double amplitude = 0.0;
};

struct PsiSample {
  double psi = 0.0;
  double psi_tau = 0.0;
  Vector psi_x;
};

PsiSample eval_psi(const ConformalCorrection& psi, double tau, std::span<const double> x);

struct ArwModel {
  ArwConstants constants;
  WarpFunction warp;
  SpatialMetricField sigma;
  ConformalCorrection psi;

  /// Exact power law, flat sigma, psi = 0.
  static ArwModel exact(const ArwConstants& constants);
  static ArwModel perturbed(const ArwConstants& constants, double epsilon, double sigma_amplitude,
                            double psi_amplitude);
};

struct ArwConditionCheck {
  std::string name;
  std::vector<double> values;  // one per tau sample
  double expected = 0.0;       // target for limit checks, bound for boundedness checks
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ArwConditionReport {
  std::vector<double> tau;
  std::vector<ArwConditionCheck> checks;
  bool all_pass = false;
};

/// Tabulates the warp asymptotics at tau samples increasing toward 0.
/// Limit checks use |measured - expected| <= 1e-6 + 10 |tau_last|; "converges"
/// checks compare the last two samples with the same tolerance; boundedness
/// checks require the last value to stay within 10x the early maximum.
ArwConditionReport arw_condition_report(const ArwModel& model, std::span<const double> tau_samples);

/// Mixed shifted shape operator of the coordinate slice {x^0 = tau}:
/// -1/2 sigma^{jk} sigma_dot_ki - f' delta + (psi_alpha nu^alpha) delta, with nu = -(1, 0).
Matrix slice_shifted_curvature(const ArwModel& model, double tau, std::span<const double> x);

}  // namespace ifcf
