#include "ifcf/curvature.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {
namespace {

// Eigenvalue gap below which F^{ij} falls back to F_1 g^{ij}.
constexpr double kCoalescenceGap = 1e-10;
constexpr double kSymmetryTolerance = 1e-10;

}  // namespace

CurvatureKind parse_curvature_kind(std::string_view name) {
  if (name == "mean") return CurvatureKind::MeanCurvature;
  if (name == "gauss_root") return CurvatureKind::NthRootGauss;
  fail(ErrorKind::Config, fmt::format("unknown curvature.kind '{}' (expected mean | gauss_root)", name));
}

std::string_view to_string(CurvatureKind kind) noexcept {
  return kind == CurvatureKind::MeanCurvature ? "mean" : "gauss_root";
}

CurvatureFunction::CurvatureFunction(CurvatureKind kind, int n) : kind_(kind), n_(n) {
  if (n < 1 || n > kMaxDim) {
    fail(ErrorKind::Config, fmt::format("curvature dimension must be in [1, {}], got {}", kMaxDim, n));
  }
}

void CurvatureFunction::require_cone(const Vector& kappa) const {
  if (kappa.size() != n_) {
    fail(ErrorKind::OutsideCone, fmt::format("expected {} curvatures, got {}", n_, kappa.size()));
  }
  if (kind_ == CurvatureKind::NthRootGauss && !(kappa.minCoeff() > 0.0)) {
    fail(ErrorKind::OutsideCone, fmt::format("min kappa = {} is not positive", kappa.minCoeff()));
  }
}

double CurvatureFunction::value(const Vector& kappa) const {
  require_cone(kappa);
  if (kind_ == CurvatureKind::MeanCurvature) return kappa.sum();
  const double product = kappa.prod();
  switch (n_) {
    case 1: return product;
    case 2: return 2.0 * std::sqrt(product);
    case 3: return 3.0 * std::cbrt(product);
    default: return n_ * std::exp(kappa.array().log().mean());
  }
}

Vector CurvatureFunction::gradient(const Vector& kappa) const {
  if (kind_ == CurvatureKind::MeanCurvature) {
    require_cone(kappa);
    return Vector::Ones(n_);
  }
  const double f = value(kappa);
  return (f / n_) * kappa.cwiseInverse();
}

CurvatureEvaluation CurvatureFunction::evaluate(const Matrix& h_mixed, const Matrix& g) const {
  if (h_mixed.rows() != n_ || g.rows() != n_) {
    fail(ErrorKind::NonSymmetric, fmt::format("dimension mismatch: F is {}-dimensional", n_));
  }
  const Matrix h_cov = g * h_mixed;
  const double scale = std::max(1.0, h_cov.cwiseAbs().maxCoeff());
  const double asym = (h_cov - h_cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    fail(ErrorKind::NonSymmetric, fmt::format("g-symmetrization residual {} exceeds tolerance", asym));
  }
  const Matrix h_sym = 0.5 * (h_cov + h_cov.transpose());

  Matrix lower_inv;
  if (!cholesky_inverse_factor(g, lower_inv)) fail(ErrorKind::NotPositiveDefinite, "metric is not positive definite");
  // b = L^{-1} h L^{-T}: symmetric, same spectrum as the mixed operator.
  const Matrix b = lower_inv * h_sym * lower_inv.transpose();
  const auto eig = symmetric_eigen(0.5 * (b + b.transpose()));

  CurvatureEvaluation out;
  out.kappa = eig.values;
  out.value = value(out.kappa);
  out.gradient = gradient(out.kappa);

  if (out.kappa.maxCoeff() - out.kappa.minCoeff() < kCoalescenceGap) {
    out.tensor_derivative = out.gradient(0) * (lower_inv.transpose() * lower_inv);
  } else {
    // g-orthonormal eigenvectors e = L^{-T} q.
    const Matrix frame = lower_inv.transpose() * eig.vectors;
    out.tensor_derivative = frame * out.gradient.asDiagonal() * frame.transpose();
  }
  return out;
}

Matrix CurvatureFunction::tensor_derivative(const Matrix& h_mixed, const Matrix& g) const {
  return evaluate(h_mixed, g).tensor_derivative;
}

double kstar_ratio(const CurvatureFunction& cf, const Vector& kappa) {
  const Vector grad = cf.gradient(kappa);
  const double numerator = grad.dot(kappa.cwiseAbs2());
  return numerator / (cf.value(kappa) * kappa.sum());
}

KstarCertificate certify_kstar(const CurvatureFunction& cf, const KstarSampler& sampler) {
  if (sampler.samples < 1000) {
    fail(ErrorKind::Config, fmt::format("certify_kstar needs >= 1000 samples, got {}", sampler.samples));
  }
  if (!(sampler.kappa_min > 0.0) || !(sampler.kappa_max > sampler.kappa_min)) {
    fail(ErrorKind::Config, "certify_kstar needs 0 < kappa_min < kappa_max");
  }
  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> log_kappa(std::log(sampler.kappa_min), std::log(sampler.kappa_max));

  KstarCertificate cert;
  cert.samples = sampler.samples;
  cert.informational = cf.kind() == CurvatureKind::MeanCurvature;
  cert.epsilon0_estimate = std::numeric_limits<double>::infinity();

  Vector kappa(cf.dimension());
  for (int s = 0; s < sampler.samples; ++s) {
    for (int i = 0; i < cf.dimension(); ++i) kappa(i) = std::exp(log_kappa(rng));
    const double ratio = kstar_ratio(cf, kappa);
    if (ratio < cert.epsilon0_estimate) {
      cert.epsilon0_estimate = ratio;
      cert.worst_point = kappa;
    }
  }
  return cert;
}

}  // namespace ifcf
