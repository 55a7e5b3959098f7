#include "ifcf/arw_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {

ArwConstants ArwConstants::make(int n, double omega, double m, double a) {
  if (n < 1) fail(ErrorKind::Config, fmt::format("model.n must be >= 1, got {}", n));
  if (n + omega - 2.0 <= 0.0) {
    fail(ErrorKind::Config, fmt::format("n + omega - 2 must be positive (n={}, omega={})", n, omega));
  }
  if (!(m > 0.0)) fail(ErrorKind::Config, fmt::format("model.m must be positive, got {}", m));
  if (!(a < 0.0)) fail(ErrorKind::Config, fmt::format("model.a must be negative, got {}", a));
  ArwConstants c;
  c.n = n;
  c.omega = omega;
  c.m = m;
  c.a = a;
  c.gamma_tilde = 0.5 * (n + omega - 2.0);
  c.gamma = c.gamma_tilde / n;
  return c;
}

WarpDerivatives eval_warp(const WarpFunction& warp, double tau) {
  const auto& c = warp.constants;
  if (!(tau < 0.0) || tau < c.a) {
    fail(ErrorKind::Domain, fmt::format("tau = {} outside [{}, 0)", tau, c.a));
  }
  const double gt = c.gamma_tilde;
  WarpDerivatives d;
  d.f = std::log(-gt * std::sqrt(c.m) * tau) / gt;
  d.df = 1.0 / (gt * tau);
  d.d2f = -1.0 / (gt * tau * tau);
  d.d3f = 2.0 / (gt * tau * tau * tau);

  const double eps = warp.epsilon;
  switch (warp.kind) {
    case WarpKind::ExactPowerLaw:
      break;
    case WarpKind::Perturbed:
      d.f += eps * tau * tau;
      d.df += 2.0 * eps * tau;
      d.d2f += 2.0 * eps;
      d.shift = 6.0 * eps + 4.0 * gt * eps * eps * tau * tau;
      d.dshift = 8.0 * gt * eps * eps * tau;
      break;
    case WarpKind::InversePerturbation:
      d.f += eps / tau;
      d.df -= eps / (tau * tau);
      d.d2f += 2.0 * eps / (tau * tau * tau);
      d.d3f -= 6.0 * eps / (tau * tau * tau * tau);
      d.shift = gt * eps * eps / (tau * tau * tau * tau);
      d.dshift = -4.0 * d.shift / tau;
      break;
  }
  return d;
}

SpatialMetricField SpatialMetricField::flat(int n) {
  SpatialMetricField field;
  field.n = n;
  field.perturbation.constant = Matrix::Zero(n, n);
  field.perturbation.cos_amplitude = Matrix::Zero(n, n);
  return field;
}

SpatialMetricField SpatialMetricField::single_mode(int n, double amplitude) {
  auto field = flat(n);
  field.perturbation.cos_amplitude(0, 0) = amplitude;
  return field;
}

bool SpatialMetricField::is_homogeneous() const {
  return perturbation.cos_amplitude.isZero(0.0);
}

SigmaSample eval_sigma(const SpatialMetricField& field, double tau, std::span<const double> x) {
  const int n = field.n;
  const auto& p = field.perturbation;
  const double cx = std::cos(x[0]);
  const double sx = std::sin(x[0]);

  SigmaSample out;
  const Matrix pert = p.constant + cx * p.cos_amplitude;
  out.sigma = Matrix::Identity(n, n) + tau * tau * pert;
  out.sigma_dot = 2.0 * tau * pert;
  for (int k = 0; k < n; ++k) out.sigma_x[static_cast<std::size_t>(k)] = Matrix::Zero(n, n);
  out.sigma_x[0] = -tau * tau * sx * p.cos_amplitude;

  if (n == 1) {
    if (!(out.sigma(0, 0) > 0.0)) {
      fail(ErrorKind::NotPositiveDefinite, fmt::format("sigma = {} at tau = {}", out.sigma(0, 0), tau));
    }
  } else if (Matrix lower_inv; !cholesky_inverse_factor(out.sigma, lower_inv)) {
    fail(ErrorKind::NotPositiveDefinite, fmt::format("sigma has a non-positive eigenvalue at tau = {}", tau));
  }
  return out;
}

PsiSample eval_psi(const ConformalCorrection& psi, double tau, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  PsiSample out;
  out.psi_x = Vector::Zero(n);
  if (psi.amplitude == 0.0) return out;

  double q = psi.amplitude;
  for (double xk : x) q *= std::cos(xk);
  out.psi = tau * tau * q;
  out.psi_tau = 2.0 * tau * q;
  for (Eigen::Index k = 0; k < n; ++k) {
    double dq = -psi.amplitude * std::sin(x[static_cast<std::size_t>(k)]);
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l != k) dq *= std::cos(x[static_cast<std::size_t>(l)]);
    }
    out.psi_x(k) = tau * tau * dq;
  }
  return out;
}

ArwModel ArwModel::exact(const ArwConstants& constants) {
  ArwModel model;
  model.constants = constants;
  model.warp = WarpFunction{WarpKind::ExactPowerLaw, constants, 0.0};
  model.sigma = SpatialMetricField::flat(constants.n);
  return model;
}

ArwModel ArwModel::perturbed(const ArwConstants& constants, double epsilon, double sigma_amplitude,
                             double psi_amplitude) {
  ArwModel model;
  model.constants = constants;
  model.warp = WarpFunction{WarpKind::Perturbed, constants, epsilon};
  model.sigma = SpatialMetricField::single_mode(constants.n, sigma_amplitude);
  model.psi.amplitude = psi_amplitude;
  return model;
}

namespace {

ArwConditionCheck limit_check(std::string name, std::vector<double> values, double expected, double tol) {
  ArwConditionCheck check;
  check.name = std::move(name);
  check.expected = expected;
  check.tolerance = tol;
  check.deviation = std::abs(values.back() - expected);
  check.pass = std::isfinite(check.deviation) && check.deviation <= tol;
  check.values = std::move(values);
  return check;
}

ArwConditionCheck cauchy_check(std::string name, std::vector<double> values, double tol) {
  ArwConditionCheck check;
  check.name = std::move(name);
  check.tolerance = tol;
  const auto k = values.size();
  check.expected = values.back();
  check.deviation = k >= 2 ? std::abs(values[k - 1] - values[k - 2]) : 0.0;
  check.pass = std::isfinite(values.back()) && std::isfinite(check.deviation) && check.deviation <= tol;
  check.values = std::move(values);
  return check;
}

ArwConditionCheck bounded_check(std::string name, std::vector<double> values) {
  ArwConditionCheck check;
  check.name = std::move(name);
  double early = 1.0;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, values.size() / 2); ++i) {
    early = std::max(early, std::abs(values[i]));
  }
  check.expected = 10.0 * early;
  check.tolerance = check.expected;
  check.deviation = std::abs(values.back());
  check.pass = std::isfinite(check.deviation) && check.deviation <= check.expected;
  check.values = std::move(values);
  return check;
}

}  // namespace

ArwConditionReport arw_condition_report(const ArwModel& model, std::span<const double> tau_samples) {
  if (tau_samples.empty()) fail(ErrorKind::Domain, "arw_condition_report needs at least one tau sample");
  for (std::size_t i = 1; i < tau_samples.size(); ++i) {
    if (!(tau_samples[i] > tau_samples[i - 1])) {
      fail(ErrorKind::Domain, "tau samples must increase strictly toward 0");
    }
  }

  const auto& c = model.constants;
  const double gt = c.gamma_tilde;
  const double tol = 1e-6 + 10.0 * std::abs(tau_samples.back());
  const auto count = tau_samples.size();

  std::vector<double> mass(count), shift(count), shift_tau(count), slope(count), exp_ratio(count), df(count);
  std::vector<double> ratio1(count), ratio2(count), ratio3(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double tau = tau_samples[i];
    const auto d = eval_warp(model.warp, tau);
    const double adf = std::abs(d.df);
    mass[i] = d.df * d.df * std::exp(2.0 * gt * d.f);
    shift[i] = d.shift;
    shift_tau[i] = d.dshift * tau;
    slope[i] = gt * d.df * tau - 1.0;
    exp_ratio[i] = std::exp(gt * d.f) / tau;
    df[i] = d.df;
    ratio1[i] = 1.0;
    ratio2[i] = std::abs(d.d2f) / (adf * adf);
    ratio3[i] = std::abs(d.d3f) / (adf * adf * adf);
  }

  ArwConditionReport report;
  report.tau.assign(tau_samples.begin(), tau_samples.end());

  ArwConditionCheck negative;
  negative.name = "f_prime_negative";
  negative.pass = std::all_of(df.begin(), df.end(), [](double v) { return v < 0.0; });
  negative.deviation = *std::max_element(df.begin(), df.end());
  negative.values = df;
  report.checks.push_back(std::move(negative));

  report.checks.push_back(limit_check("mass_limit", std::move(mass), c.m, tol));
  report.checks.push_back(cauchy_check("shift_limit", std::move(shift), tol));
  report.checks.push_back(cauchy_check("shift_derivative_times_tau", std::move(shift_tau), tol));
  report.checks.push_back(limit_check("slope_relation", std::move(slope), 0.0, tol));
  report.checks.push_back(limit_check("exp_f_over_tau", std::move(exp_ratio), -gt * std::sqrt(c.m), tol));
  report.checks.push_back(bounded_check("derivative_ratio_1", std::move(ratio1)));
  report.checks.push_back(bounded_check("derivative_ratio_2", std::move(ratio2)));
  report.checks.push_back(bounded_check("derivative_ratio_3", std::move(ratio3)));

  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const ArwConditionCheck& ch) { return ch.pass; });
  return report;
}

Matrix slice_shifted_curvature(const ArwModel& model, double tau, std::span<const double> x) {
  const int n = model.constants.n;
  const auto s = eval_sigma(model.sigma, tau, x);
  const auto d = eval_warp(model.warp, tau);
  const auto psi = eval_psi(model.psi, tau, x);
  const Matrix weingarten = -0.5 * s.sigma.ldlt().solve(s.sigma_dot);
  return weingarten + (-d.df - psi.psi_tau) * Matrix::Identity(n, n);
}

}  // namespace ifcf
