#include "kahlerflow/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kahlerflow/identities.hpp"
#include "kahlerflow/lattice.hpp"
#include "kahlerflow/ode.hpp"

namespace kflow {

namespace fs = std::filesystem;

namespace {

// Raised for unusable output locations; reported as a configuration error.
class OutputError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

fs::path prepare_output(const Json& cfg) {
  const fs::path dir = cfg.at("output_dir").get<std::string>();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw OutputError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json report_header(const std::string& command, const Json& cfg) {
  return Json{{"command", command}, {"convention_version", kConventionVersion}, {"config", cfg}};
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

SuiteTolerances tolerances_from(const Json& t) {
  SuiteTolerances tol;
  tol.cancellation = t.at("cancellation").get<double>();
  tol.trace_compatibility = t.at("trace_compatibility").get<double>();
  tol.scalar_compatibility = t.at("scalar_compatibility").get<double>();
  tol.system_s_equivalence = t.at("system_s_equivalence").get<double>();
  tol.kahler_einstein_stationarity = t.at("kahler_einstein_stationarity").get<double>();
  tol.sharp_oracle = t.at("sharp_oracle").get<double>();
  tol.sharp_equivariance = t.at("sharp_equivariance").get<double>();
  tol.structure_constants = t.at("structure_constants").get<double>();
  tol.round_trip = t.at("round_trip").get<double>();
  tol.trace_identity = t.at("trace_identity").get<double>();
  tol.ricci_claim = t.at("ricci_claim").get<double>();
  tol.boundary_identity = t.at("boundary_identity").get<double>();
  tol.eigen_sum_boundary = t.at("eigen_sum_boundary").get<double>();
  return tol;
}

OdeState initial_from(const Json& j) {
  OdeState st;
  st.R = j.at("R").get<double>();
  st.mu = j.at("mu").get<double>();
  for (int a = 0; a < 3; ++a) st.s[a] = j.at("s").at(a).get<double>();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) st.M(a, b) = j.at("M").at(a).at(b).get<double>();
  return st;
}

}  // namespace

Json resolve_config(const CommandLine& cl) {
  Json cfg = default_config(cl.command);
  if (cl.config_path) {
    std::ifstream f(*cl.config_path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + *cl.config_path + "'");
    Json file;
    try {
      file = Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file '" + *cl.config_path + "' is not valid JSON: " + e.what());
    }
    merge_config(cfg, file);
  }
  for (const auto& o : cl.overrides) apply_override(cfg, o);
  if (cl.output_dir) cfg["output_dir"] = *cl.output_dir;
  if (cl.seed) {
    if (!cfg.contains("seed")) throw ConfigError("command '" + cl.command + "' takes no seed");
    cfg["seed"] = *cl.seed;
  }
  try {
    validate_config(cl.command, cfg);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

int cmd_identities(const Json& cfg, std::ostream& log) {
  const fs::path dir = prepare_output(cfg);
  IdentityOptions opt;
  opt.seed = cfg.at("seed").get<std::uint64_t>();
  opt.samples = cfg.at("samples").get<long>();
  opt.ricci_samples = cfg.at("ricci_samples").get<long>();
  opt.equivariance_samples = cfg.at("equivariance_samples").get<long>();
  opt.mu_min = cfg.at("mu_min").get<double>();
  opt.mu_max = cfg.at("mu_max").get<double>();
  opt.scale = cfg.at("scale").get<double>();

  const auto results = run_identity_suites(opt, tolerances_from(cfg.at("tolerances")));
  Json report = report_header("identities", cfg);
  Json suites = Json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    suites.push_back(Json{{"suite", r.suite},
                          {"samples", r.samples},
                          {"max_violation", r.max_violation},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass}});
    all_pass = all_pass && r.pass;
    log << (r.pass ? "PASS " : "FAIL ") << r.suite << " max_violation=" << format_double(r.max_violation)
        << " tolerance=" << format_double(r.tolerance) << '\n';
  }
  report["suites"] = suites;
  report["pass"] = all_pass;
  write_json(dir / "identities_report.json", report);
  return all_pass ? kExitOk : kExitPropertyFailure;
}

int cmd_ode(const Json& cfg, std::ostream& log) {
  const fs::path dir = prepare_output(cfg);
  EnsembleConfig ec;
  ec.seed = cfg.at("seed").get<std::uint64_t>();
  ec.count = cfg.at("count").get<int>();
  ec.horizon = cfg.at("horizon").get<double>();
  ec.dt = cfg.at("dt").get<double>();
  ec.mu_min = cfg.at("mu_min").get<double>();
  ec.mu_max = cfg.at("mu_max").get<double>();
  ec.scale = cfg.at("scale").get<double>();
  ec.blowup_threshold = cfg.at("blowup_threshold").get<double>();
  const Json& tol = cfg.at("tolerances");
  ec.excursion_tol = tol.at("excursion").get<double>();
  ec.touch_window = tol.at("touch_window").get<double>();
  ec.touch_rhs_tol = tol.at("touch_rhs").get<double>();
  if (!cfg.at("initial").is_null()) ec.initial_override = initial_from(cfg.at("initial"));

  const EnsembleReport rep = ensemble_cone_test(ec);
  write_text(dir / "ode_runs.csv", runs_csv(rep));

  Json flagged = Json::array();
  for (const auto& r : rep.runs) {
    if (!r.hypothesis_unmet && r.failure == FailureKind::none && !run_failed(r, ec)) continue;
    flagged.push_back(Json{{"run_id", r.run_id},
                           {"hypothesis_unmet", r.hypothesis_unmet},
                           {"classification", failure_kind_name(r.failure)},
                           {"initial_two_sum", r.initial_two_sum},
                           {"initial_det", r.initial_det},
                           {"min_two_sum", r.min_two_sum},
                           {"min_det", r.min_det},
                           {"worst_touch_rhs_two_sum", r.worst_touch_rhs_two_sum},
                           {"worst_touch_rhs_det", r.worst_touch_rhs_det}});
  }

  Json summary = report_header("ode", cfg);
  summary["runs"] = static_cast<int>(rep.runs.size());
  summary["violations_two_sum"] = rep.violations_two_sum;
  summary["violations_det"] = rep.violations_det;
  summary["worst_min"] = finite_or_null(rep.worst_min);
  summary["blowups"] = rep.blowups;
  summary["hypothesis_unmet"] = rep.hypothesis_unmet;
  summary["touch_failures"] = rep.touch_failures;
  summary["integrator_precision_failures"] = rep.integrator_precision_failures;
  summary["excursions_two_sum"] = rep.excursions_two_sum;
  summary["excursions_det"] = rep.excursions_det;
  summary["min_two_sum"] = finite_or_null(rep.min_two_sum);
  summary["min_det"] = finite_or_null(rep.min_det);
  summary["touches"] = rep.touches;
  summary["worst_touch_rhs"] = finite_or_null(rep.worst_touch_rhs);
  summary["worst_touch_rhs_unprojected"] = finite_or_null(rep.worst_touch_rhs_raw);
  summary["max_asymmetry"] = rep.max_asymmetry;
  summary["ricci_positive_at_start"] = rep.ricci_positive_at_start;
  summary["ricci_positive_onsets"] = rep.ricci_positive_onsets;
  summary["total_draws"] = rep.total_draws;
  summary["flagged_runs"] = flagged;

  const bool ok = rep.violations_two_sum == 0 && rep.violations_det == 0 && rep.touch_failures == 0 &&
                  rep.integrator_precision_failures == 0 && rep.max_asymmetry <= 1e-12;
  summary["pass"] = ok;
  write_json(dir / "ode_summary.json", summary);

  log << "runs=" << rep.runs.size() << " violations_two_sum=" << rep.violations_two_sum
      << " violations_det=" << rep.violations_det << " touch_failures=" << rep.touch_failures
      << " integrator_precision_failures=" << rep.integrator_precision_failures << " blowups=" << rep.blowups
      << " hypothesis_unmet=" << rep.hypothesis_unmet << " worst_min=" << format_double(rep.worst_min) << '\n';
  return ok ? kExitOk : kExitPropertyFailure;
}

namespace {

PotentialField potential_from(const Json& cfg, const TorusGrid& grid) {
  const std::string kind = cfg.at("potential").get<std::string>();
  const double eps = cfg.at("epsilon").get<double>();
  if (kind == "zero") return PotentialField::zero(grid);
  if (kind == "cos_x1") return PotentialField::cos_x1(grid, eps);
  if (kind == "cos_sum") return PotentialField::cos_sum(grid, eps);
  const Expression expr(cfg.at("expression").get<std::string>());
  return PotentialField::from_function(
      grid, [&](double x1, double y1, double x2, double y2) { return eps * expr(x1, y1, x2, y2); });
}

std::string snapshot_name(long step) {
  std::string digits = std::to_string(step);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "snapshot_" + digits + ".bin";
}

}  // namespace

int cmd_lattice(const Json& cfg, std::ostream& log) {
  const fs::path dir = prepare_output(cfg);
  const TorusGrid grid(cfg.at("grid_n").get<int>());
  const long steps = cfg.at("steps").get<long>();
  const double dt = cfg.at("dt_factor").get<double>() * grid.h() * grid.h();
  const double mu = cfg.at("mu").get<double>();
  const long snapshot_every = cfg.at("snapshot_every").get<long>();
  FlowOptions flow;
  flow.stability_factor_max = cfg.at("tolerances").at("stability_factor_max").get<double>();

  Json summary = report_header("lattice", cfg);
  summary["N"] = grid.n();
  summary["h"] = grid.h();
  summary["dt"] = dt;

  std::string csv = "step,t,sup_abs_phi,sup_abs_R,min_det_indicator,min_two_sum,min_metric_eigenvalue\n";
  Json snapshots = Json::array();
  long step = 0;
  double prev_sup = 0.0;
  bool sup_decreasing = true;
  int status = kExitOk;

  try {
    PotentialField phi = potential_from(cfg, grid);
    {
      const LatticeGeometry geom(phi);
      const double defect = ricci_dual_formula_defect(geom);
      summary["dual_formula_defect"] = defect;
      summary["dual_formula_constant"] = defect / std::pow(grid.h(), 4);
    }
    for (step = 0; step <= steps; ++step) {
      if (step > 0) phi = potential_flow_step(phi, dt, mu, flow);
      const DiagnosticField d = diagnostics(phi);
      const double t = static_cast<double>(step) * dt;
      const double sup = phi.sup_abs();
      if (step > 0 && !(sup < prev_sup)) sup_decreasing = false;
      prev_sup = sup;
      csv += std::to_string(step) + ',' + format_double(t) + ',' + format_double(sup) + ',' +
             format_double(d.sup_abs_R) + ',' + format_double(d.summary_det.min) + ',' +
             format_double(d.summary_two_sum.min) + ',' + format_double(d.min_metric_eigenvalue) + '\n';
      if (snapshot_every > 0 && step % snapshot_every == 0) {
        Snapshot snap;
        snap.n = grid.n();
        snap.h = grid.h();
        snap.t = t;
        snap.step = step;
        snap.background = phi.background;
        snap.fields = {"phi", "R", "s_norm", "det_indicator", "two_sum"};
        snap.data = {phi.phi, d.R, d.s_norm, d.det_indicator, d.two_sum};
        const std::string name = snapshot_name(step);
        write_snapshot((dir / name).string(), snap);
        snapshots.push_back(name);
      }
      summary["final_mean_phi"] = phi.mean();
      summary["final_background"] = phi.background;
      summary["final_max_symmetry_violation"] = d.max_symmetry_violation;
      summary["final_max_trace_identity_defect"] = d.max_trace_identity_defect;
    }
    summary["status"] = "completed";
    summary["steps_completed"] = steps;
  } catch (const NonPositiveMetric& e) {
    summary["status"] = "NonPositiveMetric";
    summary["failing_step"] = step;
    summary["point"] = e.point();
    summary["eigenvalue"] = e.eigenvalue();
    summary["steps_completed"] = step > 0 ? step - 1 : 0;
    log << "NonPositiveMetric at step " << step << ": " << e.what() << '\n';
    status = kExitNumerical;
  } catch (const StabilityViolation& e) {
    summary["status"] = "StabilityViolation";
    summary["failing_step"] = step;
    summary["steps_completed"] = step > 0 ? step - 1 : 0;
    log << "StabilityViolation at step " << step << ": " << e.what() << '\n';
    status = kExitNumerical;
  }
  // Recorded, not asserted: the torus cannot carry the cone hypotheses.
  summary["sup_abs_phi_strictly_decreasing"] = sup_decreasing;
  summary["snapshots"] = snapshots;
  write_text(dir / "lattice_steps.csv", csv);
  write_json(dir / "lattice_summary.json", summary);
  if (status == kExitOk) log << "completed " << steps << " steps, dt=" << format_double(dt) << '\n';
  return status;
}

int run_command(const CommandLine& cl, std::ostream& log, std::ostream& err) {
  Json cfg;
  try {
    cfg = resolve_config(cl);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    if (cl.command == "identities") return cmd_identities(cfg, log);
    if (cl.command == "ode") return cmd_ode(cfg, log);
    return cmd_lattice(cfg, log);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace kflow
