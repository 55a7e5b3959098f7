#include "ifcf/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "ifcf/errors.hpp"

namespace ifcf {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json to_json(const TraceHeader& h) {
  return {{"n", h.n},
          {"N", h.N},
          {"omega", h.omega},
          {"m", h.m},
          {"a", h.a},
          {"gamma_tilde", h.gamma_tilde},
          {"gamma", h.gamma},
          {"curvature", h.curvature},
          {"model_hash", h.model_hash},
          {"t_max", h.t_max},
          {"seed_offset", h.seed_offset}};
}

ordered_json to_json(const FlowRecord& r) {
  return {{"t", r.t},
          {"step", r.step},
          {"checkpoint", r.checkpoint},
          {"min_u", r.min_u},
          {"max_u", r.max_u},
          {"min_u_tilde", r.min_u_tilde},
          {"max_u_tilde", r.max_u_tilde},
          {"max_du_tilde_dt", r.max_du_tilde_dt},
          {"min_F", r.min_F},
          {"min_F_scaled", r.min_F_scaled},
          {"max_F_scaled", r.max_F_scaled},
          {"min_dudt", r.min_dudt},
          {"max_vt", r.max_vt},
          {"max_du_sigma", r.max_du_sigma},
          {"max_kappa_deviation", r.max_kappa_deviation},
          {"umbilic", r.umbilic},
          {"umbilic_breve", r.umbilic_breve},
          {"metric_deviation", r.metric_deviation},
          {"max_speed", r.max_speed}};
}

ordered_json to_json(const InvariantLog& l) {
  return {{"accepted_steps", l.accepted_steps},
          {"rejected_steps", l.rejected_steps},
          {"max_du_sigma2", l.max_du_sigma2},
          {"min_kappa", l.min_kappa},
          {"max_metric_residual", l.max_metric_residual},
          {"min_dudt", l.min_dudt},
          {"initial_min_F", l.initial_min_F},
          {"min_F_drop", l.min_F_drop},
          {"monotonicity_violations", l.monotonicity_violations},
          {"inf_F_violations", l.inf_F_violations}};
}

ordered_json to_json(const Trajectory& tr) {
  ordered_json x = ordered_json::array();
  for (const auto& p : tr.x) x.push_back({p[0], p[1]});
  return {{"base", tr.base}, {"axis", tr.axis}, {"sign", tr.sign},
          {"start", {tr.start[0], tr.start[1]}}, {"x", x}, {"y0", tr.y0}};
}

template <typename T>
void read(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json rate_json(const std::optional<RateFit>& fit, double predicted, double factor) {
  if (!fit) return {{"predicted", predicted}, {"available", false}};
  return {{"available", true},
          {"lambda", fit->lambda},
          {"predicted", predicted},
          {"threshold", factor * predicted},
          {"pass", fit->lambda >= factor * predicted},
          {"intercept", fit->intercept},
          {"t_start", fit->t_start},
          {"t_end", fit->t_end},
          {"residual_rms", fit->residual_rms},
          {"samples", fit->samples}};
}

std::ofstream open_output(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorKind::Io, fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish(out, path);
}

void write_snapshot_csv(const Snapshot& s, const TraceHeader& header, const fs::path& path) {
  auto out = open_output(path);
  const ordered_json meta = {{"t", s.t}, {"model_hash", header.model_hash}, {"n", header.n}, {"N", header.N}};
  out << "# " << meta.dump() << "\n";
  out << "x1,x2,u,v,k1,k2,F\n";
  const double dx = 2.0 * M_PI / header.N;
  for (std::size_t p = 0; p < s.u.size(); ++p) {
    const auto i = static_cast<int>(p % static_cast<std::size_t>(header.N));
    const auto j = static_cast<int>(p / static_cast<std::size_t>(header.N));
    const double k2 = s.kappa2.empty() ? std::nan("") : s.kappa2[p];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i * dx, j * dx, s.u[p], s.v[p],
                       s.kappa1[p], k2, s.F[p]);
  }
  finish(out, path);
}

void write_trace(const FlowTrace& trace, const fs::path& dir) {
  ordered_json j;
  j["header"] = to_json(trace.header);
  j["status"] = {{"ok", trace.ok()}, {"stop_reason", trace.stop_reason}};
  if (trace.failure) {
    j["status"]["failure"] = {{"kind", std::string(to_string(trace.failure->kind))},
                              {"message", trace.failure->message}};
  }
  j["invariants"] = to_json(trace.invariants);
  j["records"] = ordered_json::array();
  for (const auto& r : trace.records) j["records"].push_back(to_json(r));
  j["trajectories"] = ordered_json::array();
  for (const auto& tr : trace.trajectories) j["trajectories"].push_back(to_json(tr));
  write_text(dir / "trace.json", dump(j));

  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    write_snapshot_csv(trace.snapshots[i], trace.header, dir / "snapshots" / fmt::format("snapshot_{:04d}.csv", i));
  }
  if (trace.failure_snapshot) write_snapshot_csv(*trace.failure_snapshot, trace.header, dir / "snapshots" / "failure.csv");
}

FlowTrace read_trace(const fs::path& dir) {
  const auto path = dir / "trace.json";
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, fmt::format("cannot read '{}'", path.string()));
  FlowTrace trace;
  try {
    const auto j = ordered_json::parse(in);
    const auto& h = j.at("header");
    auto& th = trace.header;
    read(h, "n", th.n);
    read(h, "N", th.N);
    read(h, "omega", th.omega);
    read(h, "m", th.m);
    read(h, "a", th.a);
    read(h, "gamma_tilde", th.gamma_tilde);
    read(h, "gamma", th.gamma);
    read(h, "curvature", th.curvature);
    read(h, "model_hash", th.model_hash);
    read(h, "t_max", th.t_max);
    read(h, "seed_offset", th.seed_offset);

    const auto& status = j.at("status");
    read(status, "stop_reason", trace.stop_reason);
    if (status.contains("failure")) {
      FlowFailure f;
      const auto kind = status.at("failure").at("kind").get<std::string>();
      for (auto k : {ErrorKind::Domain, ErrorKind::NotPositiveDefinite, ErrorKind::OutsideCone,
                     ErrorKind::NonSymmetric, ErrorKind::NotSpacelike, ErrorKind::NotConvex,
                     ErrorKind::ComplexSpectrum, ErrorKind::Stiffness, ErrorKind::ConvexityLost,
                     ErrorKind::InsufficientRange, ErrorKind::NonPositiveSeries, ErrorKind::Config, ErrorKind::Io}) {
        if (to_string(k) == kind) f.kind = k;
      }
      read(status.at("failure"), "message", f.message);
      trace.failure = f;
    }

    const auto& inv = j.at("invariants");
    auto& l = trace.invariants;
    read(inv, "accepted_steps", l.accepted_steps);
    read(inv, "rejected_steps", l.rejected_steps);
    read(inv, "max_du_sigma2", l.max_du_sigma2);
    read(inv, "min_kappa", l.min_kappa);
    read(inv, "max_metric_residual", l.max_metric_residual);
    read(inv, "min_dudt", l.min_dudt);
    read(inv, "initial_min_F", l.initial_min_F);
    read(inv, "min_F_drop", l.min_F_drop);
    read(inv, "monotonicity_violations", l.monotonicity_violations);
    read(inv, "inf_F_violations", l.inf_F_violations);

    for (const auto& rj : j.at("records")) {
      FlowRecord r;
      read(rj, "t", r.t);
      read(rj, "step", r.step);
      read(rj, "checkpoint", r.checkpoint);
      read(rj, "min_u", r.min_u);
      read(rj, "max_u", r.max_u);
      read(rj, "min_u_tilde", r.min_u_tilde);
      read(rj, "max_u_tilde", r.max_u_tilde);
      read(rj, "max_du_tilde_dt", r.max_du_tilde_dt);
      read(rj, "min_F", r.min_F);
      read(rj, "min_F_scaled", r.min_F_scaled);
      read(rj, "max_F_scaled", r.max_F_scaled);
      read(rj, "min_dudt", r.min_dudt);
      read(rj, "max_vt", r.max_vt);
      read(rj, "max_du_sigma", r.max_du_sigma);
      read(rj, "max_kappa_deviation", r.max_kappa_deviation);
      read(rj, "umbilic", r.umbilic);
      read(rj, "umbilic_breve", r.umbilic_breve);
      read(rj, "metric_deviation", r.metric_deviation);
      read(rj, "max_speed", r.max_speed);
      trace.records.push_back(r);
    }
    for (const auto& tj : j.at("trajectories")) {
      Trajectory tr;
      read(tj, "base", tr.base);
      read(tj, "axis", tr.axis);
      read(tj, "sign", tr.sign);
      read(tj, "start", tr.start);
      read(tj, "x", tr.x);
      read(tj, "y0", tr.y0);
      trace.trajectories.push_back(std::move(tr));
    }
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::Io, fmt::format("malformed '{}': {}", path.string(), e.what()));
  }
  return trace;
}

void write_oracle_csv(std::span<const HomogeneousSample> samples, const ArwConstants& constants,
                      const fs::path& path) {
  auto out = open_output(path);
  out << "t,u,u_tilde,F\n";
  for (const auto& s : samples) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.u, s.u * std::exp(constants.gamma * s.t), s.F);
  }
  finish(out, path);
}

void write_transition_csv(const TransitionCurve& curve, const fs::path& path) {
  auto out = open_output(path);
  out << "seed,xi1,xi2,s,y0,y1,y2,stencil\n";
  for (std::size_t k = 0; k < curve.seeds.size(); ++k) {
    const auto& sc = curve.seeds[k];
    for (std::size_t i = 0; i < sc.s.size(); ++i) {
      out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", k, sc.seed[0], sc.seed[1], sc.s[i],
                         sc.y0[i], sc.y[i][0], sc.y[i][1], sc.stencil[i] ? 1 : 0);
    }
  }
  finish(out, path);
}

void write_umbilicality_csv(const FlowTrace& trace, const fs::path& path) {
  auto out = open_output(path);
  out << "t,umbilic,umbilic_breve\n";
  for (const auto& r : trace.records) out << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.t, r.umbilic, r.umbilic_breve);
  finish(out, path);
}

std::string rates_json(const AsymptoticReport& report, const DiagnosticsConfig& config) {
  const double g = report.gamma;
  const double factor = config.rate_factor;
  ordered_json j;
  j["gamma"] = g;
  j["window"] = {report.window_start, report.window_end};
  j["rate_factor"] = factor;
  j["u_tilde"] = {{"min", report.u_tilde.min_u_tilde},
                  {"max", report.u_tilde.max_u_tilde},
                  {"window_min", report.u_tilde.window_min_u_tilde},
                  {"window_max", report.u_tilde.window_max_u_tilde},
                  {"initial_spread", report.u_tilde.initial_spread},
                  {"final_spread", report.u_tilde.final_spread},
                  {"du_tilde_dt_rate", rate_json(report.u_tilde.du_tilde_rate, 2.0 * g, factor)}};
  j["du_sigma_rate"] = rate_json(report.du_rate, g, factor);
  j["vt_minus_one_rate"] = rate_json(report.vt_rate, 2.0 * g, factor);
  j["umbilic_rate"] = rate_json(report.umbilic_rate, 2.0 * g, factor);
  j["umbilic_breve_rate"] = rate_json(report.umbilic_breve_rate, report.breve_predicted, factor);
  j["speed_rate"] = rate_json(report.speed_rate, 2.0 * g, factor);
  j["F_scaled_band"] = {{"low", report.F_band_low}, {"high", report.F_band_high}, {"ratio", report.F_band_ratio}};
  j["final_kappa_deviation"] = report.final_kappa_deviation;
  j["final_metric_deviation"] = report.final_metric_deviation;
  j["metric_deviation_monotone"] = report.metric_deviation_monotone;
  return dump(j);
}

std::string c3_json(const C3Report& report) {
  ordered_json j;
  j["h_s"] = report.h_s;
  j["constant"] = report.constant;
  j["all_pass"] = report.all_pass;
  j["order_pass"] = {{"1", report.order_passes(1)}, {"2", report.order_passes(2)}, {"3", report.order_passes(3)}};
  j["y0_linear_residual"] = report.y0_linear_residual;
  j["entries"] = ordered_json::array();
  for (const auto& e : report.entries) {
    j["entries"].push_back({{"seed", e.seed},
                            {"component", e.component},
                            {"order", e.order},
                            {"left", e.left},
                            {"right", e.right},
                            {"difference", e.difference},
                            {"tolerance", e.tolerance},
                            {"pass", e.pass}});
  }
  j["limits"] = ordered_json::array();
  for (const auto& l : report.limits) {
    j["limits"].push_back(
        {{"seed", l.seed}, {"name", l.name}, {"value", l.value}, {"tolerance", l.tolerance}, {"pass", l.pass}});
  }
  j["note"] = "xi-derivatives are sampled at finitely many seeds; adequacy for a given perturbation is empirical";
  return dump(j);
}

std::string kstar_json(const KstarCertificate& c, const CurvatureFunction& cf) {
  ordered_json j;
  j["kind"] = std::string(to_string(cf.kind()));
  j["n"] = cf.dimension();
  j["epsilon0_estimate"] = c.epsilon0_estimate;
  j["samples"] = c.samples;
  std::vector<double> worst(c.worst_point.data(), c.worst_point.data() + c.worst_point.size());
  j["worst_point"] = worst;
  j["positive"] = c.epsilon0_estimate > 0.0;
  j["informational"] = c.informational;
  return dump(j);
}

}  // namespace ifcf
