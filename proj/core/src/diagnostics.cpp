#include "ifcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {

UmbilicalityNorms umbilicality(const GraphState& state) {
  UmbilicalityNorms out;
  const auto n = static_cast<Eigen::Index>(state.grid.n);
  for (const auto& pt : state.points) {
    const Matrix mixed = pt.metric.g_inv * pt.h;
    const Matrix trace_free = mixed - (mixed.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
    const double norm = principal_curvatures(trace_free).cwiseAbs().maxCoeff();
    out.scaled = std::max(out.scaled, norm / pt.F);
    out.breve = std::max(out.breve, std::exp(-pt.psi_tilde) * norm);
  }
  return out;
}

Matrix rescaled_metric_limit(const ArwConstants& constants, double u_tilde) {
  const double gt = constants.gamma_tilde;
  const double factor = std::pow(gt * gt * constants.m, 1.0 / gt) * std::pow(-u_tilde, 2.0 / gt);
  return factor * Matrix::Identity(constants.n, constants.n);
}

double rescaled_metric_deviation(const GraphState& state, const ArwConstants& constants) {
  const double growth = std::exp(2.0 * state.t / constants.n);
  const double rescale = std::exp(constants.gamma * state.t);
  double worst = 0.0;
  for (std::size_t p = 0; p < state.points.size(); ++p) {
    const auto& pt = state.points[p];
    const Matrix breve_g = std::exp(2.0 * pt.psi_tilde) * pt.metric.g;
    const Matrix diff = growth * breve_g - rescaled_metric_limit(constants, state.u[p] * rescale);
    worst = std::max(worst, operator_norm_symmetric(0.5 * (diff + diff.transpose())));
  }
  return worst;
}

RateFit fit_rate(std::span<const double> t, std::span<const double> values, double t_start, double t_end) {
  if (t.size() != values.size()) fail(ErrorKind::InsufficientRange, "time and value series differ in length");
  const double slack = 1e-12 * std::max(1.0, std::abs(t_end));
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_start - slack || t[i] > t_end + slack) continue;
    if (!(values[i] > 0.0)) {
      fail(ErrorKind::NonPositiveSeries, fmt::format("value {} at t = {} is not positive", values[i], t[i]));
    }
    ts.push_back(t[i]);
    logs.push_back(std::log(values[i]));
  }
  if (ts.size() < 10) {
    fail(ErrorKind::InsufficientRange,
         fmt::format("{} samples in [{}, {}], need at least 10", ts.size(), t_start, t_end));
  }
  const auto count = static_cast<double>(ts.size());
  double mean_t = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mean_t += ts[i];
    mean_y += logs[i];
  }
  mean_t /= count;
  mean_y /= count;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mean_t) * (ts[i] - mean_t);
    sty += (ts[i] - mean_t) * (logs[i] - mean_y);
  }
  const double slope = stt > 0.0 ? sty / stt : 0.0;

  RateFit fit;
  fit.lambda = -slope;
  fit.intercept = mean_y - slope * mean_t;
  fit.t_start = t_start;
  fit.t_end = t_end;
  fit.samples = ts.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (fit.intercept + slope * ts[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / count);
  return fit;
}

namespace {

struct Window {
  double start = 0.0;
  double end = 0.0;
};

Window fit_window(const FlowTrace& trace, const DiagnosticsConfig& config) {
  if (trace.records.empty()) fail(ErrorKind::InsufficientRange, "trace has no records");
  const double t_final = trace.records.back().t;
  return {config.window_start * t_final, config.window_end * t_final};
}

template <typename Getter>
std::vector<double> column(const FlowTrace& trace, Getter&& get) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) out.push_back(get(r));
  return out;
}

template <typename Getter>
std::optional<RateFit> try_fit(const FlowTrace& trace, Window w, Getter&& get) {
  const auto t = column(trace, [](const FlowRecord& r) { return r.t; });
  const auto v = column(trace, get);
  try {
    return fit_rate(t, v, w.start, w.end);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonPositiveSeries) return std::nullopt;
    throw;
  }
}

bool in_window(double t, Window w) {
  const double slack = 1e-12 * std::max(1.0, std::abs(w.end));
  return t >= w.start - slack && t <= w.end + slack;
}

}  // namespace

RescaledGraphSummary rescaled_graph(const FlowTrace& trace, const DiagnosticsConfig& config) {
  const auto w = fit_window(trace, config);
  RescaledGraphSummary out;
  out.min_u_tilde = std::numeric_limits<double>::infinity();
  out.max_u_tilde = -std::numeric_limits<double>::infinity();
  out.window_min_u_tilde = out.min_u_tilde;
  out.window_max_u_tilde = out.max_u_tilde;
  for (const auto& r : trace.records) {
    out.min_u_tilde = std::min(out.min_u_tilde, r.min_u_tilde);
    out.max_u_tilde = std::max(out.max_u_tilde, r.max_u_tilde);
    if (in_window(r.t, w)) {
      out.window_min_u_tilde = std::min(out.window_min_u_tilde, r.min_u_tilde);
      out.window_max_u_tilde = std::max(out.window_max_u_tilde, r.max_u_tilde);
    }
  }
  out.initial_spread = trace.records.front().max_u_tilde - trace.records.front().min_u_tilde;
  out.final_spread = trace.records.back().max_u_tilde - trace.records.back().min_u_tilde;
  out.du_tilde_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.max_du_tilde_dt; });
  return out;
}

AsymptoticReport analyze_trace(const FlowTrace& trace, const DiagnosticsConfig& config) {
  const auto w = fit_window(trace, config);
  AsymptoticReport out;
  out.gamma = trace.header.gamma;
  out.breve_predicted = (trace.header.n + trace.header.omega - 4.0) / (2.0 * trace.header.n);
  out.window_start = w.start;
  out.window_end = w.end;
  out.u_tilde = rescaled_graph(trace, config);
  out.du_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.max_du_sigma; });
  out.vt_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.max_vt - 1.0; });
  out.umbilic_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.umbilic; });
  out.umbilic_breve_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.umbilic_breve; });
  out.speed_rate = try_fit(trace, w, [](const FlowRecord& r) { return r.max_speed; });

  out.F_band_low = std::numeric_limits<double>::infinity();
  out.F_band_high = 0.0;
  out.metric_deviation_monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (!in_window(r.t, w)) continue;
    out.F_band_low = std::min(out.F_band_low, r.min_F_scaled);
    out.F_band_high = std::max(out.F_band_high, r.max_F_scaled);
    if (r.metric_deviation > previous * (1.0 + 1e-9) + 1e-16) out.metric_deviation_monotone = false;
    previous = r.metric_deviation;
  }
  out.F_band_ratio = out.F_band_high / out.F_band_low;
  out.final_kappa_deviation = trace.records.back().max_kappa_deviation;
  out.final_metric_deviation = trace.records.back().metric_deviation;
  return out;
}

// ---- transition --------------------------------------------------------------

TransitionCurve build_transition_curve(const FlowTrace& trace) {
  const auto& h = trace.header;
  if (trace.trajectories.empty()) fail(ErrorKind::InsufficientRange, "trace has no trajectories");
  const auto count = trace.records.size();
  if (count < 4) fail(ErrorKind::InsufficientRange, fmt::format("{} records, need at least 4", count));
  const double t_final = trace.records.back().t;
  if (h.gamma * t_final < std::log(4.0)) {
    fail(ErrorKind::InsufficientRange,
         fmt::format("gamma t_final = {} < ln 4: no room for a four-point stencil", h.gamma * t_final));
  }

  // Stencil: the last four checkpoint records if available, else the last four records.
  std::vector<bool> left_stencil(count, false);
  std::vector<std::size_t> checkpoints;
  for (std::size_t k = 0; k < count; ++k) {
    if (trace.records[k].checkpoint) checkpoints.push_back(k);
  }
  if (checkpoints.size() >= 4) {
    for (std::size_t i = checkpoints.size() - 4; i < checkpoints.size(); ++i) left_stencil[checkpoints[i]] = true;
  } else {
    for (std::size_t k = count - 4; k < count; ++k) left_stencil[k] = true;
  }

  TransitionCurve curve;
  curve.n = h.n;
  curve.gamma = h.gamma;
  for (std::size_t b = 0; b < trace.trajectories.size(); ++b) {
    const auto& base = trace.trajectories[b];
    if (base.axis != -1) continue;
    if (base.x.size() != count || base.y0.size() != count) {
      fail(ErrorKind::InsufficientRange, "trajectory samples are not aligned with the records");
    }

    // Offset partners for xi-derivatives.
    std::array<const Trajectory*, 2> plus{nullptr, nullptr};
    std::array<const Trajectory*, 2> minus{nullptr, nullptr};
    for (const auto& tr : trace.trajectories) {
      if (tr.base != base.base || tr.axis < 0 || tr.axis >= h.n) continue;
      (tr.sign > 0 ? plus : minus)[static_cast<std::size_t>(tr.axis)] = &tr;
    }
    bool has_xi = h.seed_offset > 0.0;
    for (int i = 0; i < h.n; ++i) {
      has_xi = has_xi && plus[static_cast<std::size_t>(i)] && minus[static_cast<std::size_t>(i)];
    }

    SeedCurve sc;
    sc.seed = base.start;
    sc.has_xi_derivatives = has_xi;
    const auto total = 2 * count;
    sc.s.resize(total);
    sc.y0.resize(total);
    sc.y.resize(total);
    sc.stencil.resize(total);
    if (has_xi) {
      sc.dy0_dxi.resize(total);
      sc.dy_dxi.resize(total);
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double s = -std::exp(-h.gamma * trace.records[k].t) / h.gamma;
      const std::size_t left = k;
      const std::size_t right = total - 1 - k;
      sc.s[left] = s;
      sc.s[right] = -s;
      sc.y0[left] = base.y0[k];
      sc.y0[right] = -base.y0[k];
      sc.y[left] = base.x[k];
      sc.y[right] = base.x[k];
      sc.stencil[left] = left_stencil[k];
      sc.stencil[right] = left_stencil[k];
      if (has_xi) {
        std::array<double, 2> d0{};
        std::array<std::array<double, 2>, 2> dy{};
        for (int i = 0; i < h.n; ++i) {
          const auto& p = *plus[static_cast<std::size_t>(i)];
          const auto& q = *minus[static_cast<std::size_t>(i)];
          const double scale = 1.0 / (2.0 * h.seed_offset);
          d0[static_cast<std::size_t>(i)] = (p.y0[k] - q.y0[k]) * scale;
          for (int j = 0; j < h.n; ++j) {
            dy[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                (p.x[k][static_cast<std::size_t>(j)] - q.x[k][static_cast<std::size_t>(j)]) * scale;
          }
        }
        // y^0 is odd under the mirror, y^j even; xi-derivatives inherit the parity.
        sc.dy0_dxi[left] = d0;
        sc.dy0_dxi[right] = {-d0[0], -d0[1]};
        sc.dy_dxi[left] = dy;
        sc.dy_dxi[right] = dy;
      }
    }
    curve.seeds.push_back(std::move(sc));
  }
  if (curve.seeds.empty()) fail(ErrorKind::InsufficientRange, "trace has no base trajectories");
  return curve;
}

double cubic_derivative_at_zero(std::span<const double> s, std::span<const double> y, int order) {
  if (s.size() != 4 || y.size() != 4) fail(ErrorKind::InsufficientRange, "cubic stencil needs exactly 4 points");
  double scale = 0.0;
  for (double si : s) scale = std::max(scale, std::abs(si));
  Eigen::Matrix4d vandermonde;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    const double ti = s[static_cast<std::size_t>(i)] / scale;
    double power = 1.0;
    for (int j = 0; j < 4; ++j) {
      vandermonde(i, j) = power;
      power *= ti;
    }
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector4d coeff = vandermonde.fullPivLu().solve(rhs);
  double factorial = 1.0;
  for (int k = 2; k <= order; ++k) factorial *= k;
  return factorial * coeff(order) / std::pow(scale, order);
}

bool C3Report::order_passes(int order) const {
  bool any = false;
  for (const auto& e : entries) {
    if (e.order != order) continue;
    any = true;
    if (!e.pass) return false;
  }
  return any;
}

namespace {

struct Stencil {
  std::array<std::size_t, 4> left{};   // nearest 0 first
  std::array<std::size_t, 4> right{};
};

Stencil find_stencil(const SeedCurve& sc) {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (std::size_t i = 0; i < sc.s.size(); ++i) {
    if (!sc.stencil[i]) continue;
    (sc.s[i] < 0.0 ? left : right).push_back(i);
  }
  if (left.size() != 4 || right.size() != 4) {
    fail(ErrorKind::InsufficientRange, "transition curve needs four stencil samples per side");
  }
  std::sort(left.begin(), left.end(), [&](auto a, auto b) { return std::abs(sc.s[a]) < std::abs(sc.s[b]); });
  std::sort(right.begin(), right.end(), [&](auto a, auto b) { return std::abs(sc.s[a]) < std::abs(sc.s[b]); });
  Stencil st;
  std::copy(left.begin(), left.end(), st.left.begin());
  std::copy(right.begin(), right.end(), st.right.begin());
  return st;
}

template <typename Getter>
std::array<double, 4> gather(const std::array<std::size_t, 4>& idx, Getter&& get) {
  return {get(idx[0]), get(idx[1]), get(idx[2]), get(idx[3])};
}

}  // namespace

C3Report c3_report(const TransitionCurve& curve, double constant) {
  C3Report report;
  report.constant = constant;
  if (curve.seeds.empty()) fail(ErrorKind::InsufficientRange, "transition curve has no seeds");

  const auto first = find_stencil(curve.seeds.front());
  report.h_s = std::abs(curve.seeds.front().s[first.left[3]]) / 4.0;
  const double hs = report.h_s;
  auto tol = [&](int k) { return constant * std::pow(hs, 4 - k); };

  double residual = 0.0;
  for (std::size_t seed = 0; seed < curve.seeds.size(); ++seed) {
    const auto& sc = curve.seeds[seed];
    const auto st = find_stencil(sc);
    const auto sl = gather(st.left, [&](std::size_t i) { return sc.s[i]; });
    const auto sr = gather(st.right, [&](std::size_t i) { return sc.s[i]; });

    auto check_component = [&](const std::string& name, auto&& value) {
      const auto yl = gather(st.left, value);
      const auto yr = gather(st.right, value);
      for (int k = 1; k <= 3; ++k) {
        C3Entry e;
        e.seed = seed;
        e.component = name;
        e.order = k;
        e.left = cubic_derivative_at_zero(sl, yl, k);
        e.right = cubic_derivative_at_zero(sr, yr, k);
        e.difference = std::abs(e.left - e.right);
        e.tolerance = tol(k);
        e.pass = std::isfinite(e.difference) && e.difference <= e.tolerance;
        report.entries.push_back(e);
      }
    };

    check_component("y0", [&](std::size_t i) { return sc.y0[i]; });
    for (int j = 0; j < curve.n; ++j) {
      const auto comp = static_cast<std::size_t>(j);
      const auto value = [&](std::size_t i) { return sc.y[i][comp]; };
      check_component(fmt::format("y{}", j + 1), value);

      C3LimitCheck lim;
      lim.seed = seed;
      lim.name = fmt::format("dy{}/ds -> 0", j + 1);
      lim.value = std::abs(cubic_derivative_at_zero(sl, gather(st.left, value), 1));
      lim.tolerance = tol(1);
      lim.pass = lim.value <= lim.tolerance;
      report.limits.push_back(lim);
    }

    if (sc.has_xi_derivatives) {
      for (int i = 0; i < curve.n; ++i) {
        const auto ci = static_cast<std::size_t>(i);
        C3LimitCheck lim;
        lim.seed = seed;
        lim.name = fmt::format("dy0/dxi{} -> 0", i + 1);
        lim.value = std::abs(cubic_derivative_at_zero(sl, gather(st.left, [&](std::size_t p) { return sc.dy0_dxi[p][ci]; }), 0));
        lim.tolerance = tol(0);
        lim.pass = lim.value <= lim.tolerance;
        report.limits.push_back(lim);

        for (int j = 0; j < curve.n; ++j) {
          const auto cj = static_cast<std::size_t>(j);
          C3LimitCheck conv;
          conv.seed = seed;
          conv.name = fmt::format("dy{}/dxi{} converges", j + 1, i + 1);
          conv.value = std::abs(sc.dy_dxi[st.left[0]][cj][ci] - sc.dy_dxi[st.left[1]][cj][ci]);
          conv.tolerance = tol(3);
          conv.pass = conv.value <= conv.tolerance;
          report.limits.push_back(conv);
        }
      }
    }

    // Least-squares slope through the origin over both branches.
    double num = 0.0;
    double den = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < sc.s.size(); ++i) {
      num += sc.s[i] * sc.y0[i];
      den += sc.s[i] * sc.s[i];
      peak = std::max(peak, std::abs(sc.y0[i]));
    }
    const double slope = num / den;
    double worst = 0.0;
    for (std::size_t i = 0; i < sc.s.size(); ++i) worst = std::max(worst, std::abs(sc.y0[i] - slope * sc.s[i]));
    if (peak > 0.0) residual = std::max(residual, worst / peak);
  }
  report.y0_linear_residual = residual;

  report.all_pass = std::all_of(report.entries.begin(), report.entries.end(), [](const C3Entry& e) { return e.pass; }) &&
                    std::all_of(report.limits.begin(), report.limits.end(), [](const C3LimitCheck& l) { return l.pass; });
  return report;
}

}  // namespace ifcf
