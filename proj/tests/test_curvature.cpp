#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifcf/curvature.hpp"
#include "ifcf/errors.hpp"

using namespace ifcf;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

// Random SPD metric g and a g-self-adjoint mixed operator with spectrum in
// [lo, hi]: h_cov = g^{1/2} Q diag(kappa) Q^T g^{1/2}, mixed = g^{-1} h_cov.
struct Sample {
  Matrix g;
  Matrix h_cov;
  Matrix mixed;
  Vector kappa;
};

Sample random_sample(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_kappa(std::log(lo), std::log(hi));
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = 0.4 * unit(rng);
  Sample s;
  s.g = b * b.transpose() + Matrix::Identity(n, n);
  Matrix q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = unit(rng);
  Eigen::HouseholderQR<Matrix> qr(q);
  const Matrix orth = qr.householderQ();
  s.kappa.resize(n);
  for (int i = 0; i < n; ++i) s.kappa(i) = std::exp(log_kappa(rng));
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.g);
  const Matrix root = es.operatorSqrt();
  s.h_cov = root * orth * s.kappa.asDiagonal() * orth.transpose() * root;
  s.h_cov = (0.5 * (s.h_cov + s.h_cov.transpose())).eval();
  s.mixed = s.g.inverse() * s.h_cov;
  return s;
}

}  // namespace

TEST(CurvatureFunction, ParseKinds) {
  EXPECT_EQ(parse_curvature_kind("mean"), CurvatureKind::MeanCurvature);
  EXPECT_EQ(parse_curvature_kind("gauss_root"), CurvatureKind::NthRootGauss);
  EXPECT_EQ(kind_of([] { parse_curvature_kind("harmonic"); }), ErrorKind::Config);
  EXPECT_EQ(to_string(CurvatureKind::NthRootGauss), "gauss_root");
  EXPECT_EQ(kind_of([] { CurvatureFunction(CurvatureKind::MeanCurvature, kMaxDim + 1); }), ErrorKind::Config);
}

TEST(CurvatureFunction, GaussRootValues) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  EXPECT_NEAR(f.value(vec({1, 1})), 2.0, 1e-15);
  EXPECT_NEAR(f.value(vec({1, 4})), 4.0, 1e-15);
  const Vector grad = f.gradient(vec({1, 4}));
  EXPECT_NEAR(grad(0), 2.0, 1e-15);
  EXPECT_NEAR(grad(1), 0.5, 1e-15);
  const CurvatureFunction f3(CurvatureKind::NthRootGauss, 3);
  EXPECT_NEAR(f3.value(vec({1, 1, 1})), 3.0, 1e-14);
  EXPECT_NEAR(f3.value(vec({1, 2, 4})), 6.0, 1e-14);
}

TEST(CurvatureFunction, MeanValues) {
  const CurvatureFunction f(CurvatureKind::MeanCurvature, 2);
  EXPECT_EQ(f.value(vec({1, 1})), 2.0);
  EXPECT_EQ(f.value(vec({-1, 4})), 3.0);
  EXPECT_EQ(f.gradient(vec({0.3, 7})), vec({1, 1}));
}

TEST(CurvatureFunction, OutsideCone) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  EXPECT_EQ(kind_of([&] { (void)f.value(vec({0.0, 1.0})); }), ErrorKind::OutsideCone);
  EXPECT_EQ(kind_of([&] { (void)f.value(vec({-1.0, 2.0})); }), ErrorKind::OutsideCone);
}

TEST(CurvatureFunction, VanishesAtConeBoundary) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  double previous = f.value(vec({1.0, 1.0}));
  for (double k = 1e-1; k >= 1e-12; k *= 1e-1) {
    const double value = f.value(vec({k, 1.0}));
    EXPECT_LT(value, previous);
    previous = value;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(TensorDerivative, DiagonalOperatorInIdentityMetric) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 3.0;
  const Matrix d = f.tensor_derivative(h, Matrix::Identity(2, 2));
  EXPECT_NEAR(d(0, 0), std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(d(1, 1), std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(d(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(d(1, 0), 0.0, 1e-15);
}

TEST(TensorDerivative, MeanCurvatureGivesInverseMetric) {
  std::mt19937_64 rng(7);
  const CurvatureFunction f(CurvatureKind::MeanCurvature, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_sample(rng, 2, 0.1, 10.0);
    const Matrix d = f.tensor_derivative(s.mixed, s.g);
    EXPECT_LT((d - s.g.inverse()).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(TensorDerivative, RejectsNonSelfAdjoint) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  Matrix h(2, 2);
  h << 1.0, 0.5, 0.0, 1.0;
  EXPECT_EQ(kind_of([&] { (void)f.tensor_derivative(h, Matrix::Identity(2, 2)); }), ErrorKind::NonSymmetric);
}

TEST(TensorDerivative, RotationInvariance) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.3;
  h(1, 1) = 4.1;
  const auto base = f.evaluate(h, Matrix::Identity(2, 2));
  for (double angle : {0.1, 0.7, 1.5, 2.9}) {
    Matrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Matrix rotated = r * h * r.transpose();
    const auto eval = f.evaluate(rotated, Matrix::Identity(2, 2));
    EXPECT_NEAR(eval.value, base.value, 1e-13);
    EXPECT_LT((eval.tensor_derivative - r * base.tensor_derivative * r.transpose()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

class CurvatureProperties : public ::testing::TestWithParam<std::tuple<CurvatureKind, int>> {};

TEST_P(CurvatureProperties, HomogeneityEulerAndSymmetry) {
  const auto [kind, n] = GetParam();
  const CurvatureFunction f(kind, n);
  std::mt19937_64 rng(11 + n);
  std::uniform_real_distribution<double> log_kappa(std::log(1e-2), std::log(1e2));
  for (int trial = 0; trial < 500; ++trial) {
    Vector k(n);
    for (int i = 0; i < n; ++i) k(i) = std::exp(log_kappa(rng));
    const double value = f.value(k);
    const double scale = std::exp(log_kappa(rng));
    EXPECT_NEAR(f.value(scale * k), scale * value, 1e-12 * scale * value);
    EXPECT_NEAR(f.gradient(k).dot(k), value, 1e-12 * value);
    Vector reversed = k.reverse();
    EXPECT_NEAR(f.value(reversed), value, 1e-12 * value);
    for (int i = 0; i < n; ++i) EXPECT_GT(f.gradient(k)(i), 0.0);
  }
}

TEST_P(CurvatureProperties, GradientMatchesFiniteDifferences) {
  const auto [kind, n] = GetParam();
  const CurvatureFunction f(kind, n);
  std::mt19937_64 rng(23 + n);
  std::uniform_real_distribution<double> log_kappa(std::log(0.1), std::log(10.0));
  for (int trial = 0; trial < 200; ++trial) {
    Vector k(n);
    for (int i = 0; i < n; ++i) k(i) = std::exp(log_kappa(rng));
    const Vector grad = f.gradient(k);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-6 * k(i);
      Vector kp = k, km = k;
      kp(i) += h;
      km(i) -= h;
      EXPECT_NEAR((f.value(kp) - f.value(km)) / (2 * h), grad(i), 1e-6 * std::max(1.0, std::abs(grad(i))));
    }
  }
}

TEST_P(CurvatureProperties, TensorDerivativeMatchesFiniteDifferences) {
  const auto [kind, n] = GetParam();
  const CurvatureFunction f(kind, n);
  std::mt19937_64 rng(31 + n);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_sample(rng, n, 0.2, 5.0);
    const auto eval = f.evaluate(s.mixed, s.g);
    const Matrix g_inv = s.g.inverse();
    // dF = F^{ij} dh_ij; perturb the covariant tensor symmetrically.
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double eps = 1e-6;
        Matrix dh = Matrix::Zero(n, n);
        dh(i, j) = eps;
        dh(j, i) = eps;
        const double fp = f.evaluate(g_inv * (s.h_cov + dh), s.g).value;
        const double fm = f.evaluate(g_inv * (s.h_cov - dh), s.g).value;
        const double fd = (fp - fm) / (2 * eps);
        const double expected = i == j ? eval.tensor_derivative(i, i)
                                       : eval.tensor_derivative(i, j) + eval.tensor_derivative(j, i);
        EXPECT_NEAR(fd, expected, 1e-6 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST_P(CurvatureProperties, ContractionMatchesEigenbasis) {
  const auto [kind, n] = GetParam();
  const CurvatureFunction f(kind, n);
  std::mt19937_64 rng(43 + n);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_sample(rng, n, 1e-2, 1e2);
    const auto eval = f.evaluate(s.mixed, s.g);
    const Matrix d = eval.tensor_derivative;
    EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-10 * d.cwiseAbs().maxCoeff());
    const double contraction = (d.cwiseProduct(s.h_cov)).sum();
    const double eigen_sum = eval.gradient.dot(eval.kappa);
    EXPECT_NEAR(contraction, eigen_sum, 1e-9 * std::abs(eigen_sum));
    EXPECT_NEAR(eval.value, eigen_sum, 1e-10 * eval.value);
    Vector sorted = s.kappa;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_LT((eval.kappa - sorted).cwiseAbs().maxCoeff(), 1e-9 * sorted.maxCoeff());
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, CurvatureProperties,
                         ::testing::Combine(::testing::Values(CurvatureKind::MeanCurvature, CurvatureKind::NthRootGauss),
                                            ::testing::Values(1, 2, 3)));

TEST(CurvatureEvaluate, CoalescentSpectrum) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  Matrix g(2, 2);
  g << 2.0, 0.3, 0.3, 1.0;
  const Matrix mixed = 1.7 * Matrix::Identity(2, 2);
  const auto eval = f.evaluate(mixed, g);
  EXPECT_NEAR(eval.value, 3.4, 1e-14);
  EXPECT_LT((eval.tensor_derivative - g.inverse()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Kstar, RatioAtUmbilicPointAndScaling) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  EXPECT_NEAR(kstar_ratio(f, vec({1, 1})), 0.5, 1e-15);
  for (double scale : {1e-3, 1.0, 1e3}) {
    EXPECT_NEAR(kstar_ratio(f, scale * vec({0.3, 2.0})), kstar_ratio(f, vec({0.3, 2.0})), 1e-13);
  }
  // F = 2 sqrt(k1 k2): F^{ij} h_ik h^k_j = sum F_i k_i^2 = F H / 2 for every kappa.
  EXPECT_NEAR(kstar_ratio(f, vec({0.01, 50.0})), 0.5, 1e-12);
}

TEST(Kstar, Certificate) {
  const CurvatureFunction gauss(CurvatureKind::NthRootGauss, 2);
  const auto cert = certify_kstar(gauss);
  EXPECT_EQ(cert.samples, 10000);
  EXPECT_FALSE(cert.informational);
  EXPECT_NEAR(cert.epsilon0_estimate, 0.5, 1e-10);
  const CurvatureFunction mean(CurvatureKind::MeanCurvature, 2);
  const auto info = certify_kstar(mean);
  EXPECT_TRUE(info.informational);
  EXPECT_GT(info.epsilon0_estimate, 0.0);
  EXPECT_LE(info.epsilon0_estimate, 1.0);
  KstarSampler small;
  small.samples = 999;
  EXPECT_EQ(kind_of([&] { certify_kstar(gauss, small); }), ErrorKind::Config);
  const CurvatureFunction gauss3(CurvatureKind::NthRootGauss, 3);
  EXPECT_GT(certify_kstar(gauss3).epsilon0_estimate, 0.0);
}
