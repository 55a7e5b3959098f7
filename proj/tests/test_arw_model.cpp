#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "ifcf/arw_model.hpp"
#include "ifcf/curvature.hpp"
#include "ifcf/errors.hpp"

using namespace ifcf;

namespace {

const ArwConstants kDefaults = ArwConstants::make(2, 2.0, 1.0, -1.0);

std::span<const double> at(const std::array<double, 2>& x) { return {x.data(), 2}; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(ArwConstants, DerivedExponents) {
  EXPECT_EQ(kDefaults.gamma_tilde, 1.0);
  EXPECT_EQ(kDefaults.gamma, 0.5);
  const auto c = ArwConstants::make(2, 4.0, 1.0, -1.0);
  EXPECT_EQ(c.gamma_tilde, 2.0);
  EXPECT_EQ(c.gamma, 1.0);
  const auto odd = ArwConstants::make(3, 0.5, 2.0, -3.0);
  EXPECT_DOUBLE_EQ(odd.gamma_tilde, 0.75);
  EXPECT_DOUBLE_EQ(odd.gamma, 0.25);
}

TEST(ArwConstants, RejectsViolatedInvariants) {
  EXPECT_EQ(kind_of([] { ArwConstants::make(2, 0.0, 1.0, -1.0); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { ArwConstants::make(2, 2.0, 0.0, -1.0); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { ArwConstants::make(2, 2.0, 1.0, 0.5); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { ArwConstants::make(0, 4.0, 1.0, -1.0); }), ErrorKind::Config);
}

TEST(EvalWarp, ExactPowerLawValues) {
  const WarpFunction w{WarpKind::ExactPowerLaw, kDefaults, 0.0};
  const auto d = eval_warp(w, -0.5);
  EXPECT_NEAR(d.f, std::log(0.5), 1e-15);
  EXPECT_NEAR(d.df, -2.0, 1e-15);
  EXPECT_NEAR(d.d2f, -4.0, 1e-15);
  EXPECT_NEAR(d.d3f, -16.0, 1e-14);
}

TEST(EvalWarp, ExactPowerLawIdentities) {
  for (double omega : {2.0, 3.0, 4.0}) {
    const auto c = ArwConstants::make(2, omega, 1.7, -1.0);
    const WarpFunction w{WarpKind::ExactPowerLaw, c, 0.0};
    for (double tau : {-0.9, -0.3, -1e-2, -1e-5}) {
      const auto d = eval_warp(w, tau);
      EXPECT_NEAR(d.df * d.df * std::exp(2.0 * c.gamma_tilde * d.f), c.m, 1e-12 * c.m);
      EXPECT_NEAR(d.d2f + c.gamma_tilde * d.df * d.df, 0.0, 1e-12 * d.df * d.df);
      EXPECT_NEAR(std::exp(c.gamma_tilde * d.f) / tau, -c.gamma_tilde * std::sqrt(c.m), 1e-14);
      EXPECT_NEAR(c.gamma_tilde * d.df * tau - 1.0, 0.0, 1e-15);
    }
  }
}

TEST(EvalWarp, PerturbedShiftsValueAndSlope) {
  const auto exact = eval_warp({WarpKind::ExactPowerLaw, kDefaults, 0.0}, -0.5);
  const auto pert = eval_warp({WarpKind::Perturbed, kDefaults, 0.1}, -0.5);
  EXPECT_NEAR(pert.f, exact.f + 0.025, 1e-15);
  EXPECT_NEAR(pert.df, exact.df - 0.1, 1e-15);
  EXPECT_NEAR(pert.d2f, exact.d2f + 0.2, 1e-15);
  EXPECT_NEAR(pert.d3f, exact.d3f, 1e-15);
}

TEST(EvalWarp, DerivativesMatchFiniteDifferences) {
  for (auto kind : {WarpKind::ExactPowerLaw, WarpKind::Perturbed, WarpKind::InversePerturbation}) {
    const WarpFunction w{kind, kDefaults, 0.1};
    const double tau = -0.4;
    const double h = 1e-5;
    const auto p = eval_warp(w, tau + h);
    const auto m = eval_warp(w, tau - h);
    const auto d = eval_warp(w, tau);
    EXPECT_NEAR((p.f - m.f) / (2 * h), d.df, 1e-8);
    EXPECT_NEAR((p.df - m.df) / (2 * h), d.d2f, 1e-7);
    EXPECT_NEAR((p.d2f - m.d2f) / (2 * h), d.d3f, 1e-5);
  }
}

TEST(EvalWarp, ClosedFormShiftMatchesRawDerivatives) {
  for (auto kind : {WarpKind::ExactPowerLaw, WarpKind::Perturbed, WarpKind::InversePerturbation}) {
    for (double omega : {2.0, 4.0}) {
      const auto c = ArwConstants::make(2, omega, 1.0, -1.0);
      const auto d = eval_warp({kind, c, 0.1}, -0.4);
      const double gt = c.gamma_tilde;
      EXPECT_NEAR(d.shift, d.d2f + gt * d.df * d.df, 1e-12);
      EXPECT_NEAR(d.dshift, d.d3f + 2.0 * gt * d.df * d.d2f, 1e-11);
    }
  }
  EXPECT_EQ(eval_warp({WarpKind::ExactPowerLaw, kDefaults, 0.0}, -1e-7).shift, 0.0);
}

TEST(EvalWarp, DomainErrors) {
  const WarpFunction w{WarpKind::ExactPowerLaw, kDefaults, 0.0};
  EXPECT_EQ(kind_of([&] { eval_warp(w, 0.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { eval_warp(w, 0.1); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { eval_warp(w, -1.5); }), ErrorKind::Domain);
  EXPECT_NO_THROW(eval_warp(w, -1.0));
}

TEST(EvalSigma, FlatIsIdentity) {
  const auto s = eval_sigma(SpatialMetricField::flat(2), -0.3, at({1.0, 2.0}));
  EXPECT_EQ(s.sigma, Matrix::Identity(2, 2));
  EXPECT_EQ(s.sigma_dot, Matrix::Zero(2, 2));
  EXPECT_EQ(s.sigma_x[0], Matrix::Zero(2, 2));
  EXPECT_EQ(s.sigma_x[1], Matrix::Zero(2, 2));
}

TEST(EvalSigma, SingleModeValues) {
  const auto field = SpatialMetricField::single_mode(2, 1.0);
  for (double x1 : {0.0, 0.7, 2.0, M_PI}) {
    const auto s = eval_sigma(field, -0.5, at({x1, 0.3}));
    EXPECT_NEAR(s.sigma(0, 0), 1.0 + 0.25 * std::cos(x1), 1e-15);
    EXPECT_NEAR(s.sigma_dot(0, 0), -std::cos(x1), 1e-15);
    EXPECT_EQ(s.sigma(0, 1), s.sigma(1, 0));
    EXPECT_EQ(s.sigma(1, 1), 1.0);
    EXPECT_NEAR(s.sigma_x[0](0, 0), -0.25 * std::sin(x1), 1e-15);
    EXPECT_EQ(s.sigma_x[1](0, 0), 0.0);
  }
  EXPECT_FALSE(field.is_homogeneous());
  EXPECT_TRUE(SpatialMetricField::flat(2).is_homogeneous());
}

TEST(EvalSigma, NotPositiveDefinite) {
  auto field = SpatialMetricField::flat(2);
  field.perturbation.constant(0, 0) = -5.0;
  EXPECT_EQ(kind_of([&] { eval_sigma(field, -0.5, at({0.0, 0.0})); }), ErrorKind::NotPositiveDefinite);
}

TEST(EvalPsi, ProductOfCosines) {
  const ConformalCorrection psi{0.2};
  const auto p = eval_psi(psi, -0.5, at({0.3, 1.1}));
  const double q = 0.2 * std::cos(0.3) * std::cos(1.1);
  EXPECT_NEAR(p.psi, 0.25 * q, 1e-16);
  EXPECT_NEAR(p.psi_tau, -q, 1e-16);
  EXPECT_NEAR(p.psi_x(0), -0.25 * 0.2 * std::sin(0.3) * std::cos(1.1), 1e-16);
  EXPECT_NEAR(p.psi_x(1), -0.25 * 0.2 * std::cos(0.3) * std::sin(1.1), 1e-16);
  const auto zero = eval_psi({0.0}, -0.5, at({0.3, 1.1}));
  EXPECT_EQ(zero.psi, 0.0);
  EXPECT_EQ(zero.psi_tau, 0.0);
}

TEST(ArwConditionReport, ExactAndPerturbedPass) {
  const std::vector<double> taus{-0.5, -1e-1, -1e-2, -1e-3, -1e-4, -1e-5, -1e-6, -1e-7};
  const auto exact = arw_condition_report(ArwModel::exact(kDefaults), taus);
  EXPECT_TRUE(exact.all_pass);
  for (const auto& c : exact.checks) {
    if (c.name == "mass_limit") {
      for (double v : c.values) EXPECT_NEAR(v, 1.0, 1e-12);
    }
  }
  const auto perturbed = arw_condition_report(ArwModel::perturbed(kDefaults, 0.1, 0.5, 0.2), taus);
  EXPECT_TRUE(perturbed.all_pass);
  for (const auto& c : perturbed.checks) {
    // f = ln(-tau) + eps tau^2 gives f'' + |f'|^2 = 6 eps + 4 eps^2 tau^2
    if (c.name == "shift_limit") EXPECT_NEAR(c.values.back(), 0.6, 1e-15);
  }
}

TEST(ArwConditionReport, InversePerturbationFails) {
  const std::vector<double> taus{-0.5, -1e-1, -5e-2, -2e-2, -1e-2};
  auto model = ArwModel::exact(kDefaults);
  model.warp.kind = WarpKind::InversePerturbation;
  model.warp.epsilon = 0.1;
  const auto report = arw_condition_report(model, taus);
  EXPECT_FALSE(report.all_pass);
  bool mass_failed = false;
  for (const auto& c : report.checks) {
    if (c.name == "mass_limit") mass_failed = !c.pass;
  }
  EXPECT_TRUE(mass_failed);
}

TEST(ArwConditionReport, RequiresIncreasingSamples) {
  const std::vector<double> taus{-0.1, -0.2};
  EXPECT_EQ(kind_of([&] { arw_condition_report(ArwModel::exact(kDefaults), taus); }), ErrorKind::Domain);
}

TEST(SliceShiftedCurvature, HomogeneousSlice) {
  const auto model = ArwModel::exact(kDefaults);
  const Matrix h = slice_shifted_curvature(model, -0.5, at({0.0, 0.0}));
  EXPECT_NEAR((h - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  const CurvatureFunction mean(CurvatureKind::MeanCurvature, 2);
  EXPECT_NEAR(mean.evaluate(h, Matrix::Identity(2, 2)).value, 4.0, 1e-14);
}

TEST(SliceShiftedCurvature, PerturbationIsRelativelySmallNearZero) {
  auto model = ArwModel::exact(kDefaults);
  model.sigma = SpatialMetricField::single_mode(2, 1.0);
  double previous = 1.0;
  for (double tau : {-0.1, -0.01, -0.001}) {
    const Matrix h = slice_shifted_curvature(model, tau, at({M_PI, 0.0}));
    const double df = std::abs(eval_warp(model.warp, tau).df);
    const double relative = (h - df * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() / df;
    EXPECT_LT(relative, 2.0 * tau * tau + 1e-15);
    EXPECT_LT(relative, previous);
    previous = relative;
  }
}
