#include "kahlerflow/ode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kahlerflow/random.hpp"

namespace kflow {

PartsRate ode_rhs(const OdeState& state) { return reaction_system_s(state.parts(), state.mu); }

namespace {

OdeState advance(const OdeState& y, const PartsRate& k, double h) {
  OdeState out = y;
  out.R += h * k.dR;
  out.s = out.s + h * k.ds;
  out.M += h * k.dM;
  return out;
}

bool exceeds(const OdeState& y, double threshold) {
  return !(std::abs(y.R) <= threshold && max_abs(y.M) <= threshold && max_abs(y.s) <= threshold);
}

}  // namespace

OdeState rk4_step(const OdeState& y, double dt) {
  const PartsRate k1 = ode_rhs(y);
  const PartsRate k2 = ode_rhs(advance(y, k1, dt / 2));
  const PartsRate k3 = ode_rhs(advance(y, k2, dt / 2));
  const PartsRate k4 = ode_rhs(advance(y, k3, dt));
  OdeState out = y;
  out.t += dt;
  out.R += dt / 6 * (k1.dR + 2 * k2.dR + 2 * k3.dR + k4.dR);
  out.s = out.s + (dt / 6) * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
  out.M += (dt / 6) * (k1.dM + 2.0 * k2.dM + 2.0 * k3.dM + k4.dM);
  out.M = symmetrized(out.M);
  return out;
}

MonitorSample monitor(const OdeState& state) {
  const CurvatureParts p = state.parts();
  return {state.t, det_indicator(p), two_smallest_sum(p.M).value, state.R};
}

Trajectory integrate(const OdeState& initial, double dt, int steps, int sample_every,
                     const IntegrateOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
  if (sample_every < 1) throw std::invalid_argument("integrate: sample_every must be >= 1");

  Trajectory traj;
  OdeState y = initial;
  y.M = symmetrized(y.M);
  traj.states.push_back(y);
  traj.monitors.push_back(monitor(y));
  for (int k = 1; k <= steps; ++k) {
    y = rk4_step(y, dt);
    if (exceeds(y, options.blowup_threshold)) {
      traj.blew_up = true;
      traj.t_blowup = y.t;
      traj.diagnostic = "blow-up guard: |R| or |M| exceeded " + format_double(options.blowup_threshold) +
                        " at t=" + format_double(y.t);
      break;
    }
    if (k % sample_every == 0 || k == steps) {
      traj.states.push_back(y);
      traj.monitors.push_back(monitor(y));
    }
  }
  return traj;
}

std::pair<OdeState, int> sample_cone_state(std::uint64_t stream_seed, const EnsembleConfig& config) {
  SplitMix64 stream(stream_seed);
  const double mu = stream.uniform(config.mu_min, config.mu_max);
  for (int draw = 1; draw <= config.max_draws_per_run; ++draw) {
    const CurvatureParts p = decompose(random_kahler_curvature(stream.next(), config.scale));
    if (two_smallest_sum(p.M).value >= 0.0 && det_indicator(p) >= 0.0) {
      return {OdeState::from_parts(p, mu), draw};
    }
  }
  throw std::runtime_error("sample_cone_state: no admissible state within max_draws_per_run");
}

RunResult run_cone_trajectory(int run_id, const OdeState& initial, const EnsembleConfig& config) {
  RunResult res;
  res.run_id = run_id;
  res.initial = initial;
  res.mu = initial.mu;

  OdeState y = initial;
  y.t = 0.0;
  y.M = symmetrized(y.M);
  MonitorSample mon = monitor(y);
  res.initial_two_sum = mon.two_sum;
  res.initial_det = mon.det_indicator;
  res.hypothesis_unmet = mon.two_sum < 0.0 || mon.det_indicator < 0.0;
  res.min_two_sum = mon.two_sum;
  res.min_det = mon.det_indicator;
  res.worst_touch_rhs_two_sum = std::numeric_limits<double>::infinity();
  res.worst_touch_rhs_det = std::numeric_limits<double>::infinity();
  res.worst_touch_rhs_two_sum_raw = std::numeric_limits<double>::infinity();
  auto note_positive = [&](const OdeState& st, const MonitorSample& m) {
    if (res.t_ricci_positive < 0.0 && st.R > 0.0 && m.det_indicator > 0.0) res.t_ricci_positive = st.t;
  };
  note_positive(y, mon);

  auto check_touches = [&](const OdeState& prev, const MonitorSample& prev_mon, const OdeState& cur,
                           const MonitorSample& cur_mon) {
    // Locate the boundary crossing by linear interpolation and integrate to
    // it exactly; otherwise evaluate at the in-window state itself.
    auto locate = [&](double v0, double v1) -> OdeState {
      if (v0 > 0.0 && v1 < 0.0) {
        const double f = v0 / (v0 - v1);
        return rk4_step(prev, f * (cur.t - prev.t));
      }
      return cur;
    };
    if (cur_mon.two_sum <= config.touch_window) {
      const OdeState at = locate(prev_mon.two_sum, cur_mon.two_sum);
      ++res.touches_two_sum;
      // The inequality is a statement on the boundary itself; an in-window
      // state carries an extra -mu (m1 + m2) of order the window.
      res.worst_touch_rhs_two_sum_raw = std::min(res.worst_touch_rhs_two_sum_raw, eigen_sum_rhs(at.M, at.s, at.mu));
      res.worst_touch_rhs_two_sum =
          std::min(res.worst_touch_rhs_two_sum, eigen_sum_rhs(project_to_two_sum_boundary(at.M), at.s, at.mu));
    }
    if (cur_mon.det_indicator <= config.touch_window) {
      const OdeState at = locate(prev_mon.det_indicator, cur_mon.det_indicator);
      const CurvatureParts p = at.parts();
      ++res.touches_det;
      res.worst_touch_rhs_det = std::min(res.worst_touch_rhs_det, det_indicator_remainder(p, at.mu));
      res.max_touch_gap = std::max(res.max_touch_gap, std::abs(boundary_identity_gap(p, at.mu)));
    }
  };

  const int steps = static_cast<int>(std::ceil(config.horizon / config.dt - 1e-9));
  for (int k = 1; k <= steps; ++k) {
    const double h = std::min(config.dt, config.horizon - y.t);
    if (h <= 0.0) break;
    const OdeState next = rk4_step(y, h);
    if (exceeds(next, config.blowup_threshold)) {
      res.blew_up = true;
      res.t_blowup = next.t;
      break;
    }
    const MonitorSample next_mon = monitor(next);
    res.max_asymmetry = std::max(res.max_asymmetry, asymmetry(next.M));
    if (next_mon.two_sum < res.min_two_sum) {
      res.min_two_sum = next_mon.two_sum;
      res.t_min_two_sum = next.t;
    }
    if (next_mon.det_indicator < res.min_det) {
      res.min_det = next_mon.det_indicator;
      res.t_min_det = next.t;
    }
    check_touches(y, mon, next, next_mon);
    note_positive(next, next_mon);
    y = next;
    mon = next_mon;
  }
  res.t_end = y.t;
  if (res.touches_two_sum == 0) res.worst_touch_rhs_two_sum = res.worst_touch_rhs_two_sum_raw = 0.0;
  if (res.touches_det == 0) res.worst_touch_rhs_det = 0.0;
  return res;
}

const char* failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::integrator_precision: return "integrator_precision";
    case FailureKind::cone_violation: return "cone_violation";
    default: return "none";
  }
}

double failure_magnitude(const RunResult& r) {
  double m = std::max({0.0, -r.min_two_sum, -r.min_det});
  if (r.touches_two_sum > 0) m = std::max(m, -r.worst_touch_rhs_two_sum);
  if (r.touches_det > 0) m = std::max(m, -r.worst_touch_rhs_det);
  return m;
}

bool run_failed(const RunResult& r, const EnsembleConfig& config) {
  if (r.hypothesis_unmet) return false;
  return r.min_two_sum < -config.excursion_tol || r.min_det < -config.excursion_tol ||
         (r.touches_two_sum > 0 && r.worst_touch_rhs_two_sum < -config.touch_rhs_tol) ||
         (r.touches_det > 0 && r.worst_touch_rhs_det < -config.touch_rhs_tol);
}

FailureKind classify_failure(const RunResult& run, const EnsembleConfig& config) {
  constexpr int kClassifyLevels = 6;
  if (!run_failed(run, config)) return FailureKind::none;
  const double first = failure_magnitude(run);
  double last = first;
  EnsembleConfig fine = config;
  for (int level = 1; level <= kClassifyLevels; ++level) {
    fine.dt *= 0.5;
    const RunResult r = run_cone_trajectory(run.run_id, run.initial, fine);
    if (!run_failed(r, fine)) return FailureKind::integrator_precision;
    last = failure_magnitude(r);
  }
  return last <= first / 16.0 ? FailureKind::integrator_precision : FailureKind::cone_violation;
}

EnsembleReport ensemble_cone_test(const EnsembleConfig& config) {
  if (config.count < 1) throw std::invalid_argument("ensemble_cone_test: count must be >= 1");
  if (!(config.horizon > 0.0) || !(config.dt > 0.0))
    throw std::invalid_argument("ensemble_cone_test: horizon and dt must be positive");

  EnsembleReport rep;
  rep.runs.resize(config.count);
  std::vector<int> draws(config.count, 0);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < config.count; ++i) {
    OdeState initial;
    if (config.initial_override) {
      initial = *config.initial_override;
    } else {
      auto [state, used] = sample_cone_state(derive_seed(config.seed, static_cast<std::uint64_t>(i)), config);
      initial = state;
      draws[i] = used;
    }
    rep.runs[i] = run_cone_trajectory(i, initial, config);
    if (config.classify_failures) rep.runs[i].failure = classify_failure(rep.runs[i], config);
  }

  // Aggregate in run order so the report does not depend on scheduling.
  rep.min_two_sum = std::numeric_limits<double>::infinity();
  rep.min_det = std::numeric_limits<double>::infinity();
  rep.worst_touch_rhs = std::numeric_limits<double>::infinity();
  rep.worst_touch_rhs_raw = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.count; ++i) {
    const RunResult& r = rep.runs[i];
    rep.total_draws += static_cast<std::uint64_t>(draws[i]);
    rep.max_asymmetry = std::max(rep.max_asymmetry, r.max_asymmetry);
    if (r.blew_up) ++rep.blowups;
    if (r.t_ricci_positive == 0.0) ++rep.ricci_positive_at_start;
    else if (r.t_ricci_positive > 0.0) ++rep.ricci_positive_onsets;
    if (r.hypothesis_unmet) {
      ++rep.hypothesis_unmet;
      continue;
    }
    rep.min_two_sum = std::min(rep.min_two_sum, r.min_two_sum);
    rep.min_det = std::min(rep.min_det, r.min_det);
    if (r.min_two_sum < -config.excursion_tol) ++rep.excursions_two_sum;
    if (r.min_det < -config.excursion_tol) ++rep.excursions_det;
    if (run_failed(r, config)) {
      const bool precision = config.classify_failures && r.failure == FailureKind::integrator_precision;
      if (precision) {
        ++rep.integrator_precision_failures;
      } else {
        if (r.min_two_sum < -config.excursion_tol) ++rep.violations_two_sum;
        if (r.min_det < -config.excursion_tol) ++rep.violations_det;
      }
    }
    rep.touches += r.touches_two_sum + r.touches_det;
    if (r.touches_two_sum > 0) {
      rep.worst_touch_rhs = std::min(rep.worst_touch_rhs, r.worst_touch_rhs_two_sum);
      rep.worst_touch_rhs_raw = std::min(rep.worst_touch_rhs_raw, r.worst_touch_rhs_two_sum_raw);
    }
    if (r.touches_det > 0) rep.worst_touch_rhs = std::min(rep.worst_touch_rhs, r.worst_touch_rhs_det);
    const bool bad_touch = (r.touches_two_sum > 0 && r.worst_touch_rhs_two_sum < -config.touch_rhs_tol) ||
                           (r.touches_det > 0 && r.worst_touch_rhs_det < -config.touch_rhs_tol);
    if (bad_touch) ++rep.touch_failures;
  }
  if (rep.hypothesis_unmet == config.count) {
    rep.min_two_sum = 0.0;
    rep.min_det = 0.0;
  }
  if (!std::isfinite(rep.worst_touch_rhs)) rep.worst_touch_rhs = 0.0;
  if (!std::isfinite(rep.worst_touch_rhs_raw)) rep.worst_touch_rhs_raw = 0.0;
  rep.worst_min = std::min(rep.min_two_sum, rep.min_det);
  return rep;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string runs_csv(const EnsembleReport& report) {
  std::string out = "run_id,t_min_two_sum,min_two_sum,t_min_det,min_det,blew_up,t_blowup\n";
  for (const auto& r : report.runs) {
    out += std::to_string(r.run_id) + ',' + format_double(r.t_min_two_sum) + ',' + format_double(r.min_two_sum) +
           ',' + format_double(r.t_min_det) + ',' + format_double(r.min_det) + ',' + (r.blew_up ? "1" : "0") +
           ',' + format_double(r.t_blowup) + '\n';
  }
  return out;
}

}  // namespace kflow
