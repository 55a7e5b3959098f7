// Command line front end: simulate, oracle, transition, check-curvature, report.
//
// Exit codes: 0 ok, 2 config, 3 not spacelike, 4 not convex (includes leaving
// the positive cone), 5 stiffness, 6 io, 7 domain, 8 insufficient data for a
// diagnostic, 9 unexpected failure, 10 the run finished but a monitored
// invariant (u or inf F monotonicity) was violated on some step.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "ifcf/arw_model.hpp"
#include "ifcf/config.hpp"
#include "ifcf/curvature.hpp"
#include "ifcf/diagnostics.hpp"
#include "ifcf/errors.hpp"
#include "ifcf/flow.hpp"
#include "ifcf/oracle.hpp"
#include "ifcf/trace_io.hpp"

namespace fs = std::filesystem;
using namespace ifcf;

namespace {

constexpr int kInvariantViolation = 10;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::NotSpacelike: return 3;
    case ErrorKind::NotConvex:
    case ErrorKind::OutsideCone:
    case ErrorKind::ConvexityLost:
    case ErrorKind::ComplexSpectrum: return 4;
    case ErrorKind::Stiffness: return 5;
    case ErrorKind::Io: return 6;
    case ErrorKind::Domain:
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::NonSymmetric: return 7;
    case ErrorKind::InsufficientRange:
    case ErrorKind::NonPositiveSeries: return 8;
  }
  return 9;
}

int simulate(const std::string& config_path, std::string out_dir) {
  const auto config = load_config(config_path);
  if (out_dir.empty()) out_dir = config.output_dir;
  if (out_dir.empty()) fail(ErrorKind::Config, "no output directory: pass --out or set output.dir");

  const auto start = std::chrono::steady_clock::now();
  auto trace = run(config.initial_data(), config.problem(), config.flow);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  trace.header.model_hash = config.model_hash;

  write_trace(trace, out_dir);
  write_text(fs::path(out_dir) / "config.cfg", canonical_text(config));

  const auto& last = trace.records.back();
  fmt::print("t = {:.6g}  steps = {} (rejected {})  stop = {}  wall = {:.2f} s\n", last.t,
             trace.invariants.accepted_steps, trace.invariants.rejected_steps, trace.stop_reason, seconds);
  fmt::print("u in [{:.6g}, {:.6g}]  u_tilde in [{:.6g}, {:.6g}]  min F = {:.6g}\n", last.min_u, last.max_u,
             last.min_u_tilde, last.max_u_tilde, last.min_F);
  if (trace.failure) {
    fmt::print(stderr, "{}: {}\n", to_string(trace.failure->kind), trace.failure->message);
    return exit_code(trace.failure->kind);
  }
  const auto& log = trace.invariants;
  if (log.monotonicity_violations > 0 || log.inf_F_violations > 0) {
    fmt::print(stderr, "invariant violation: {} steps not monotone in u, {} steps with inf F decreasing\n",
               log.monotonicity_violations, log.inf_F_violations);
    return kInvariantViolation;
  }
  return 0;
}

int oracle(double u0, double t_max, double dt, int n, double omega, double epsilon, const std::string& out) {
  const auto constants = ArwConstants::make(n, omega, 1.0, -1.0);
  auto model = ArwModel::exact(constants);
  if (epsilon != 0.0) {
    model.warp.kind = WarpKind::Perturbed;
    model.warp.epsilon = epsilon;
  }
  if (!(dt > 0.0) || !(t_max >= 0.0)) fail(ErrorKind::Config, "--dt must be positive and --t-max non-negative");
  std::vector<double> times;
  const auto count = static_cast<std::size_t>(std::llround(t_max / dt));
  for (std::size_t i = 0; i <= count; ++i) times.push_back(std::min(t_max, static_cast<double>(i) * dt));
  const CurvatureFunction cf(CurvatureKind::NthRootGauss, n);
  const auto samples = homogeneous_ode(u0, model, cf, times);
  if (out.empty()) {
    std::cout << "t,u,u_tilde,F\n";
    for (const auto& s : samples) {
      std::cout << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.u, s.u * std::exp(constants.gamma * s.t),
                               s.F);
    }
  } else {
    write_oracle_csv(samples, constants, out);
  }
  return 0;
}

DiagnosticsConfig diagnostics_for(const fs::path& dir) {
  const auto cfg = dir / "config.cfg";
  if (!fs::exists(cfg)) return {};
  return load_config(cfg).diagnostics;
}

void write_transition(const FlowTrace& trace, const fs::path& out, double constant) {
  const auto curve = build_transition_curve(trace);
  const auto report = c3_report(curve, constant);
  write_transition_csv(curve, out / "transition.csv");
  write_text(out / "c3_report.json", c3_json(report));
  fmt::print("C3 check (h_s = {:.3g}): order 1 {}, order 2 {}, order 3 {}, limits {}\n", report.h_s,
             report.order_passes(1) ? "PASS" : "FAIL", report.order_passes(2) ? "PASS" : "FAIL",
             report.order_passes(3) ? "PASS" : "FAIL", report.all_pass ? "PASS" : "FAIL");
}

int transition(const std::string& trace_dir, std::string out_dir) {
  if (!fs::is_directory(trace_dir)) fail(ErrorKind::Io, fmt::format("trace directory '{}' not found", trace_dir));
  if (out_dir.empty()) out_dir = trace_dir;
  const auto trace = read_trace(trace_dir);
  write_transition(trace, out_dir, diagnostics_for(trace_dir).c3_constant);
  return 0;
}

int check_curvature(const std::string& kind, int n, int samples, std::uint64_t seed, const std::string& out) {
  const CurvatureFunction cf(parse_curvature_kind(kind), n);
  KstarSampler sampler;
  sampler.samples = samples;
  sampler.seed = seed;
  const auto text = kstar_json(certify_kstar(cf, sampler), cf);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return 0;
}

int report(const std::string& trace_dir, std::string out_dir) {
  if (!fs::is_directory(trace_dir)) fail(ErrorKind::Io, fmt::format("trace directory '{}' not found", trace_dir));
  if (out_dir.empty()) out_dir = trace_dir;
  const fs::path out(out_dir);
  const auto trace = read_trace(trace_dir);
  const auto diag = diagnostics_for(trace_dir);
  const auto analysis = analyze_trace(trace, diag);
  write_text(out / "rates.json", rates_json(analysis, diag));
  write_umbilicality_csv(trace, out / "umbilicality.csv");
  fmt::print("F e^(-gamma t) band [{:.6g}, {:.6g}], ratio {:.4f}\n", analysis.F_band_low, analysis.F_band_high,
             analysis.F_band_ratio);
  fmt::print("final rescaled metric deviation {:.3e}\n", analysis.final_metric_deviation);
  if (trace.trajectories.empty()) {
    fmt::print("no trajectories in trace: transition artifacts skipped\n");
  } else {
    write_transition(trace, out, diag.c3_constant);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse F-curvature flow on spacelike graphs in ARW spacetimes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  auto* sim = app.add_subcommand("simulate", "Run the flow from a config file");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--out", out, "Output directory (overrides output.dir)");

  double u0 = -0.5;
  double t_max = 10.0;
  double dt = 0.1;
  int n = 2;
  double omega = 2.0;
  double epsilon = 0.0;
  auto* orc = app.add_subcommand("oracle", "Homogeneous reference solution as CSV (t, u, u_tilde, F)");
  orc->add_option("--u0", u0, "Constant initial height, in [-1, 0)")->capture_default_str();
  orc->add_option("--t-max", t_max, "Final time")->capture_default_str();
  orc->add_option("--dt", dt, "Output spacing")->capture_default_str();
  orc->add_option("--n", n, "Dimension")->capture_default_str();
  orc->add_option("--omega", omega, "ARW exponent")->capture_default_str();
  orc->add_option("--epsilon", epsilon, "Warp perturbation eps tau^2")->capture_default_str();
  orc->add_option("--out", out, "CSV path (stdout if omitted)");

  std::string trace_dir;
  auto* tra = app.add_subcommand("transition", "Transition curve and C3 report from a trace");
  tra->add_option("--trace", trace_dir, "Trace directory")->required();
  tra->add_option("--out", out, "Output directory (defaults to the trace directory)");

  std::string kind;
  int samples = 10000;
  std::uint64_t seed = 42;
  auto* chk = app.add_subcommand("check-curvature", "Sampling certificate for the (K*) inequality");
  chk->add_option("--kind", kind, "mean | gauss_root")->required();
  chk->add_option("--n", n, "Dimension")->capture_default_str();
  chk->add_option("--samples", samples, "Random cone points")->capture_default_str();
  chk->add_option("--seed", seed, "RNG seed")->capture_default_str();
  chk->add_option("--out", out, "JSON path (stdout if omitted)");

  auto* rep = app.add_subcommand("report", "Rates, umbilicality and transition artifacts from a trace");
  rep->add_option("--trace", trace_dir, "Trace directory")->required();
  rep->add_option("--out", out, "Output directory (defaults to the trace directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return simulate(config_path, out);
    if (*orc) return oracle(u0, t_max, dt, n, omega, epsilon, out);
    if (*tra) return transition(trace_dir, out);
    if (*chk) return check_curvature(kind, n, samples, seed, out);
    if (*rep) return report(trace_dir, out);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "unexpected error: {}\n", e.what());
    return 9;
  }
  return 9;
}
