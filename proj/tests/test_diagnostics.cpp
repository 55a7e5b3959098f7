#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "ifcf/diagnostics.hpp"
#include "ifcf/errors.hpp"
#include "ifcf/flow.hpp"

using namespace ifcf;

namespace {

const ArwConstants kDefaults = ArwConstants::make(2, 2.0, 1.0, -1.0);

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

// Both branches sampled from given functions at s = -4h..-h and h..4h.
TransitionCurve synthetic_curve(double h, const std::function<double(double)>& y0,
                                const std::function<double(double)>& y1) {
  TransitionCurve curve;
  curve.n = 2;
  SeedCurve sc;
  for (int k = -4; k <= 4; ++k) {
    if (k == 0) continue;
    const double s = k * h;
    sc.s.push_back(s);
    sc.y0.push_back(y0(s));
    sc.y.push_back({y1(s), 2.0});
    sc.stencil.push_back(true);
  }
  curve.seeds.push_back(sc);
  return curve;
}

FlowTrace homogeneous_trace(double t_max) {
  const FlowProblem p{Grid::make(2, 16), ArwModel::exact(kDefaults), CurvatureFunction(CurvatureKind::NthRootGauss, 2)};
  FlowConfig config;
  config.t_max = t_max;
  config.u_floor = -1e-12;
  config.trajectory_tracking = true;
  config.seeds = {{1.0, 2.0}, {3.0, 0.5}};
  return run(Field(p.grid.size(), -0.05), p, config);
}

}  // namespace

TEST(FitRate, RecoversExponent) {
  std::vector<double> t, v;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.25 * i);
    v.push_back(3.0 * std::exp(-2.0 * t.back()));
  }
  const auto fit = fit_rate(t, v, 2.0, 10.0);
  EXPECT_NEAR(fit.lambda, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-11);
  EXPECT_EQ(fit.samples, 33u);
  EXPECT_LT(fit.residual_rms, 1e-12);
}

TEST(FitRate, Errors) {
  std::vector<double> t{0, 1, 2, 3, 4}, v{1, 1, 1, 1, 1};
  EXPECT_EQ(kind_of([&] { fit_rate(t, v, 0.0, 4.0); }), ErrorKind::InsufficientRange);
  std::vector<double> t2, v2;
  for (int i = 0; i < 20; ++i) {
    t2.push_back(i);
    v2.push_back(i == 7 ? 0.0 : 1.0);
  }
  EXPECT_EQ(kind_of([&] { fit_rate(t2, v2, 0.0, 19.0); }), ErrorKind::NonPositiveSeries);
  // samples outside the window are ignored
  EXPECT_NO_THROW(fit_rate(t2, v2, 8.0, 19.0));
}

TEST(CubicDerivative, ExactOnCubics) {
  const auto p = [](double s) { return 1.5 - 0.5 * s + 2.0 * s * s + 0.7 * s * s * s; };
  const std::vector<double> s{-1e-3, -2e-3, -3e-3, -4e-3};
  std::vector<double> y;
  for (double x : s) y.push_back(p(x));
  EXPECT_NEAR(cubic_derivative_at_zero(s, y, 0), 1.5, 1e-12);
  EXPECT_NEAR(cubic_derivative_at_zero(s, y, 1), -0.5, 1e-9);
  EXPECT_NEAR(cubic_derivative_at_zero(s, y, 2), 4.0, 1e-6);
  EXPECT_NEAR(cubic_derivative_at_zero(s, y, 3), 4.2, 1e-3);
  const std::vector<double> three{1, 2, 3};
  EXPECT_EQ(kind_of([&] { cubic_derivative_at_zero(three, three, 1); }), ErrorKind::InsufficientRange);
}

TEST(C3Report, SmoothCurvePassesAllOrders) {
  const auto curve = synthetic_curve(
      1e-3, [](double s) { return 0.25 * s + 0.1 * s * s + 0.3 * s * s * s + 0.05 * std::pow(s, 5); },
      [](double s) { return 1.0 + 0.3 * s * s; });
  const auto report = c3_report(curve);
  EXPECT_DOUBLE_EQ(report.h_s, 1e-3);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(report.order_passes(k)) << "order " << k;
  EXPECT_TRUE(report.all_pass);
  for (const auto& l : report.limits) EXPECT_TRUE(l.pass) << l.name;
}

TEST(C3Report, CubicKinkFailsOnlyAtOrderThree) {
  // |s|^3 is C^2 but its third derivative jumps from -6 to 6.
  const auto curve = synthetic_curve(
      1e-3, [](double s) { return 0.25 * s + std::pow(std::abs(s), 3); }, [](double) { return 1.0; });
  const auto report = c3_report(curve);
  EXPECT_TRUE(report.order_passes(1));
  EXPECT_TRUE(report.order_passes(2));
  EXPECT_FALSE(report.order_passes(3));
  EXPECT_FALSE(report.all_pass);
  for (const auto& e : report.entries) {
    if (e.component == "y0" && e.order == 3) EXPECT_NEAR(e.difference, 12.0, 1e-6);
  }
}

TEST(C3Report, LinearCornerFailsAtOrderOne) {
  const auto curve = synthetic_curve(1e-3, [](double s) { return std::abs(s); }, [](double) { return 1.0; });
  EXPECT_FALSE(c3_report(curve).order_passes(1));
}

TEST(C3Report, NonvanishingSpatialVelocityFailsLimit) {
  const auto curve = synthetic_curve(1e-3, [](double s) { return s; }, [](double s) { return 1.0 + 0.5 * s; });
  const auto report = c3_report(curve);
  EXPECT_TRUE(report.order_passes(1));
  bool limit_failed = false;
  for (const auto& l : report.limits) limit_failed = limit_failed || (l.name == "dy1/ds -> 0" && !l.pass);
  EXPECT_TRUE(limit_failed);
}

TEST(StateDiagnostics, HomogeneousSliceIsUmbilicWithExactMetricLimit) {
  const FlowProblem p{Grid::make(2, 16), ArwModel::exact(kDefaults), CurvatureFunction(CurvatureKind::NthRootGauss, 2)};
  const auto state = assemble_geometry(Field(p.grid.size(), -0.5), 0.0, p.grid, p.model, p.cf);
  const auto u = umbilicality(state);
  EXPECT_EQ(u.scaled, 0.0);
  EXPECT_EQ(u.breve, 0.0);
  EXPECT_LT((rescaled_metric_limit(kDefaults, -0.5) - 0.25 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_LT(rescaled_metric_deviation(state, kDefaults), 1e-15);
}

TEST(StateDiagnostics, MetricLimitForOtherExponents) {
  const auto c = ArwConstants::make(2, 4.0, 2.0, -1.0);
  // (gt^2 m)^{1/gt} (-u_tilde)^{2/gt} with gt = 2
  EXPECT_NEAR(rescaled_metric_limit(c, -0.25)(0, 0), std::sqrt(8.0) * 0.25, 1e-15);
}

TEST(AnalyzeTrace, HomogeneousRun) {
  const auto trace = homogeneous_trace(8.0);
  ASSERT_TRUE(trace.ok());
  const auto report = analyze_trace(trace);
  EXPECT_NEAR(report.F_band_ratio, 1.0, 1e-9);
  EXPECT_NEAR(report.F_band_low, 40.0, 1e-7);
  EXPECT_LT(report.final_metric_deviation, 1e-12);
  EXPECT_TRUE(report.metric_deviation_monotone);
  EXPECT_FALSE(report.du_rate.has_value());
  EXPECT_FALSE(report.umbilic_rate.has_value());
  EXPECT_EQ(report.breve_predicted, 0.0);
  EXPECT_NEAR(report.u_tilde.min_u_tilde, -0.05, 1e-10);
  EXPECT_NEAR(report.u_tilde.max_u_tilde, -0.05, 1e-10);
}

TEST(TransitionCurve, HomogeneousRunIsLinearAndC3) {
  const auto trace = homogeneous_trace(10.0);
  const auto curve = build_transition_curve(trace);
  ASSERT_EQ(curve.seeds.size(), 2u);
  for (const auto& sc : curve.seeds) {
    ASSERT_TRUE(sc.has_xi_derivatives);
    ASSERT_EQ(sc.s.size(), 2 * trace.records.size());
    for (std::size_t i = 0; i < sc.s.size(); ++i) {
      // y0 = u0 e^{-gamma t} = -gamma u0 s
      EXPECT_NEAR(sc.y0[i], 0.025 * sc.s[i], 1e-12);
      EXPECT_EQ(sc.y[i], sc.seed);
      EXPECT_NEAR(sc.dy_dxi[i][0][0], 1.0, 1e-12);
      EXPECT_NEAR(sc.dy_dxi[i][1][0], 0.0, 1e-12);
      EXPECT_NEAR(sc.dy0_dxi[i][1], 0.0, 1e-12);
    }
  }
  const auto report = c3_report(curve);
  EXPECT_NEAR(report.h_s, std::exp(-5.0) / 0.5, 1e-9);
  EXPECT_TRUE(report.all_pass);
  EXPECT_LT(report.y0_linear_residual, 1e-9);
}

TEST(TransitionCurve, BuildErrors) {
  auto trace = homogeneous_trace(2.0);
  EXPECT_EQ(kind_of([&] { build_transition_curve(trace); }), ErrorKind::InsufficientRange);
  trace.trajectories.clear();
  EXPECT_EQ(kind_of([&] { build_transition_curve(trace); }), ErrorKind::InsufficientRange);
  EXPECT_EQ(kind_of([] { c3_report(TransitionCurve{}); }), ErrorKind::InsufficientRange);
}
