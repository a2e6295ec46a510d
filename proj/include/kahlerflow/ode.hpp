// Reaction ODE for (R, s, M) and ensemble checks of cone preservation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kahlerflow/cone.hpp"
#include "kahlerflow/reactions.hpp"

namespace kflow {

struct OdeState {
  double t = 0.0;
  double R = 0.0;
  Vec3 s{};
  Mat3 M{};
  double mu = 0.0;

  CurvatureParts parts() const { return {R, s, M}; }
  static OdeState from_parts(const CurvatureParts& p, double mu, double t = 0.0) {
    return {t, p.R, p.s, p.M, mu};
  }
};

/// Delegates to reaction_system_s; dM is symmetric.
PartsRate ode_rhs(const OdeState& state);

/// One classical RK4 step; M is re-symmetrized afterwards.
OdeState rk4_step(const OdeState& state, double dt);

struct MonitorSample {
  double t = 0.0;
  double det_indicator = 0.0;
  double two_sum = 0.0;
  double R = 0.0;
};

struct Trajectory {
  std::vector<OdeState> states;
  std::vector<MonitorSample> monitors;
  bool blew_up = false;
  double t_blowup = 0.0;
  std::string diagnostic;
};

struct IntegrateOptions {
  double blowup_threshold = 1e6;
};

MonitorSample monitor(const OdeState& state);

/// Integrates `steps` RK4 steps, sampling the initial state, every
/// `sample_every`-th state and the final state. Stops early (blew_up set)
/// when |R| or |M|_inf exceeds the threshold. Throws std::invalid_argument
/// for dt <= 0, steps < 1 or sample_every < 1.
Trajectory integrate(const OdeState& initial, double dt, int steps, int sample_every,
                     const IntegrateOptions& options = {});

struct EnsembleConfig {
  std::uint64_t seed = 42;
  int count = 100;
  double horizon = 1.0;
  double dt = 1e-3;
  double scale = 1.0;   // entry scale of the random curvature tensors
  double mu_min = -2.0;
  double mu_max = 2.0;
  double blowup_threshold = 1e6;
  double excursion_tol = 1e-7;
  double touch_window = 1e-6;
  double touch_rhs_tol = 1e-9;
  int max_draws_per_run = 100000;
  bool classify_failures = true;
  /// Replaces the random draw for every run. States outside the cones are
  /// integrated but flagged hypothesis_unmet.
  std::optional<OdeState> initial_override;
};

enum class FailureKind { none, integrator_precision, cone_violation };

const char* failure_kind_name(FailureKind kind);

struct RunResult {
  int run_id = 0;
  OdeState initial;
  double mu = 0.0;
  double initial_two_sum = 0.0;
  double initial_det = 0.0;
  bool hypothesis_unmet = false;
  double t_min_two_sum = 0.0;
  double min_two_sum = 0.0;
  double t_min_det = 0.0;
  double min_det = 0.0;
  bool blew_up = false;
  double t_blowup = 0.0;
  double t_end = 0.0;
  int touches_two_sum = 0;
  double worst_touch_rhs_two_sum = 0.0;  // min eigen_sum_rhs at the boundary-projected touch states
  double worst_touch_rhs_two_sum_raw = 0.0;  // same, at the in-window states themselves
  int touches_det = 0;
  double worst_touch_rhs_det = 0.0;      // min remainder over touches
  double max_touch_gap = 0.0;            // max |boundary_identity_gap| at touches
  double max_asymmetry = 0.0;
  // First time with R > 0 and det_indicator > 0 (Ricci strictly positive);
  // recorded only, -1 if never reached.
  double t_ricci_positive = -1.0;
  FailureKind failure = FailureKind::none;
};

struct EnsembleReport {
  std::vector<RunResult> runs;  // sorted by run_id
  // Raw monitor failures at the configured dt.
  int excursions_two_sum = 0;
  int excursions_det = 0;
  int touch_failures = 0;
  // Failing runs split by rerunning at dt/2 and dt/4.
  int violations_two_sum = 0;
  int violations_det = 0;
  int integrator_precision_failures = 0;
  int blowups = 0;
  int hypothesis_unmet = 0;
  double min_two_sum = 0.0;  // over runs meeting the hypotheses
  double min_det = 0.0;
  double worst_min = 0.0;    // min(min_two_sum, min_det)
  double worst_touch_rhs = 0.0;
  double worst_touch_rhs_raw = 0.0;  // two_sum touches before projection
  int touches = 0;
  double max_asymmetry = 0.0;
  int ricci_positive_at_start = 0;
  int ricci_positive_onsets = 0;  // runs starting degenerate that turn strictly positive
  std::uint64_t total_draws = 0;
};

/// Draws a random initial state inside both cones by rejection sampling
/// over decompose(random_kahler_curvature). Returns the state and the
/// number of draws used.
std::pair<OdeState, int> sample_cone_state(std::uint64_t stream_seed, const EnsembleConfig& config);

RunResult run_cone_trajectory(int run_id, const OdeState& initial, const EnsembleConfig& config);

/// Size of the worst monitor failure of a run: the largest of
/// -min_two_sum, -min_det and the touch-rhs shortfall, or 0.
double failure_magnitude(const RunResult& run);
bool run_failed(const RunResult& run, const EnsembleConfig& config);

/// Reruns a failing trajectory at dt/2, dt/4, ... dt/64. A failure that
/// vanishes at some level, or ends at least 16x smaller, is integrator
/// precision; anything else is a cone violation.
FailureKind classify_failure(const RunResult& run, const EnsembleConfig& config);

EnsembleReport ensemble_cone_test(const EnsembleConfig& config);

/// run_id,t_min_two_sum,min_two_sum,t_min_det,min_det,blew_up,t_blowup
std::string runs_csv(const EnsembleReport& report);

/// Shortest round-trip decimal for a double, locale independent.
std::string format_double(double x);

}  // namespace kflow
