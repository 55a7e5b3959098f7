#pragma once

#include <cstdint>
#include <string_view>

#include "ifcf/linalg.hpp"

namespace ifcf {

enum class CurvatureKind {
  MeanCurvature,  // sum of kappa_i
  NthRootGauss,   // n (prod kappa_i)^{1/n}
};

/// Parses "mean" / "gauss_root"; throws Config otherwise.
CurvatureKind parse_curvature_kind(std::string_view name);
std::string_view to_string(CurvatureKind kind) noexcept;

/// Principal curvatures, value, eigenvalue gradient and the contravariant
/// derivative F^{ij} of one shape operator.
struct CurvatureEvaluation {
  Vector kappa;
  double value = 0.0;
  Vector gradient;
  Matrix tensor_derivative;
};

/// Symmetric, degree-one homogeneous curvature functions normalized to F(1,...,1) = n.
class CurvatureFunction {
 public:
  CurvatureFunction(CurvatureKind kind, int n);

  [[nodiscard]] CurvatureKind kind() const noexcept { return kind_; }
  [[nodiscard]] int dimension() const noexcept { return n_; }

  /// Throws OutsideCone for NthRootGauss if some kappa_i <= 0.
  [[nodiscard]] double value(const Vector& kappa) const;
  /// dF/dkappa_i.
  [[nodiscard]] Vector gradient(const Vector& kappa) const;

  /// F^{ij} for a mixed shape operator h (h(j, i) = h^j_i) and metric g.
  /// Throws NonSymmetric when g h is not symmetric.
  [[nodiscard]] Matrix tensor_derivative(const Matrix& h_mixed, const Matrix& g) const;

  /// Same, reusing the eigen decomposition for value and gradient.
  [[nodiscard]] CurvatureEvaluation evaluate(const Matrix& h_mixed, const Matrix& g) const;

 private:
  void require_cone(const Vector& kappa) const;

  CurvatureKind kind_;
  int n_;
};

struct KstarSampler {
  int samples = 10000;
  double kappa_min = 1e-3;
  double kappa_max = 1e3;
  std::uint64_t seed = 42;
};

/// Estimate of epsilon_0 in epsilon_0 F H <= F^{ij} h_ik h^k_j.
struct KstarCertificate {
  double epsilon0_estimate = 0.0;
  int samples = 0;
  Vector worst_point;
  // Mean curvature is not claimed to be of class (K*); its estimate is reported only.
  bool informational = false;
};

/// Log-uniform sampling of each kappa_i; throws Config if samples < 1000.
KstarCertificate certify_kstar(const CurvatureFunction& cf, const KstarSampler& sampler = {});

/// F^{ij} h_ik h^k_j / (F H) in the eigenbasis.
double kstar_ratio(const CurvatureFunction& cf, const Vector& kappa);

}  // namespace ifcf
