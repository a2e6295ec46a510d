// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kahlerflow/cone.hpp"
#include "kahlerflow/decomp.hpp"
#include "kahlerflow/lattice.hpp"
#include "kahlerflow/ode.hpp"
#include "kahlerflow/random.hpp"
#include "kahlerflow/reactions.hpp"

using namespace kflow;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Sample {
  KahlerCurvature T;
  double mu;
};

Sample draw(std::uint64_t i) {
  SplitMix64 rng(derive_seed(2024, i));
  const std::uint64_t tensor_seed = rng.next();
  return {random_kahler_curvature(tensor_seed, 1.0), rng.uniform(-2.0, 2.0)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs, double limit) {
  const bool in_time = secs <= limit;
  const bool pass = ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d %s: %s; %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), secs, limit, in_time ? "" : " TOO SLOW");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Ordinary bracket contraction, independent of the library's sharp().
Mat3 bracket_oracle(const KahlerCurvature& t) {
  const TracelessTensors tl = traceless_parts(t);
  const auto& s = tl.S4;
  KahlerCurvature q;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx acc = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int r = 0; r < 2; ++r) acc += s(a, p, r, d) * s(p, b, c, r) - s(a, p, c, r) * s(p, b, r, d);
          q(a, b, c, d) = acc;
        }
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  const Mat2c phi[3] = {Mat2c::from_rows(r, 0.0, 0.0, -r), Mat2c::from_rows(0.0, r, r, 0.0),
                        Mat2c::from_rows(0.0, -i * r, i * r, 0.0)};
  Mat3 m;
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      cplx acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d) acc += q(a, b, c, d) * std::conj(phi[al](a, b)) * std::conj(phi[be](c, d));
      m(al, be) = acc.real();
    }
  return m;
}

void criteria_1_and_2() {
  auto t0 = std::chrono::steady_clock::now();
  double cancel = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Sample s = draw(i);
    const ReactionInput in{s.T, s.mu};
    cancel = std::max(cancel, max_abs(reaction_riemann_frame(in) - (reaction_riemann_coord(in) + frame_rotation_terms(in))));
  }
  report(1, "cancellation", cancel <= 1e-12, fmt("max error %.3e over 1000 tensors (tol 1e-12)", cancel), seconds_since(t0), 10);

  t0 = std::chrono::steady_clock::now();
  double system = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Sample s = draw(i);
    const CurvatureParts got = project_parts(reaction_riemann_frame({s.T, s.mu}));
    const PartsRate want = reaction_system_s(decompose(s.T), s.mu);
    system = std::max({system, std::abs(got.R - want.dR), max_abs(got.s - want.ds), max_abs(got.M - want.dM)});
  }
  report(2, "system S equivalence", system <= 1e-11, fmt("max error %.3e over 1000 tensors (tol 1e-11)", system),
         seconds_since(t0), 10);
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  const PartsRate ke = reaction_system_s({6.0, {0, 0, 0}, Mat3::identity()}, 3.0);
  const double stationary = std::max({std::abs(ke.dR), max_abs(ke.ds), max_abs(ke.dM)});
  double oracle = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const KahlerCurvature t = draw(i).T;
    oracle = std::max(oracle, max_abs(bracket_oracle(t) - sharp(decompose(t).M)));
  }
  // Convention: sharp(diag(m)) = +2 diag(m2 m3, m1 m3, m1 m2); the printed
  // -2 product would leave dM(KE) = -4 I.
  const double d_plus = max_abs(sharp(Mat3::diag({1, 2, 3})) - Mat3::diag({12, 6, 4}));
  const bool ok = stationary <= 1e-13 && oracle <= 1e-12 && d_plus <= 1e-15;
  std::ostringstream os;
  os << "KE drift " << fmt("%.3e", stationary) << " (tol 1e-13), oracle error " << fmt("%.3e", oracle)
     << " (tol 1e-12), sharp sign +2 cofactor";
  report(3, "sharp pinning", ok, os.str(), seconds_since(t0), 10);
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(derive_seed(2024, 4));
  int disagreements = 0;
  for (int k = 0; k < 10000; ++k) {
    const double A = rng.uniform(-1, 1);
    const Vec3 B{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const bool spectral = hermitian_eigenvalues(ricci_matrix_p(A, B))[0] >= -1e-10;
    if (spectral != is_ricci_nonneg(A, B, 1e-10)) ++disagreements;
  }
  report(4, "Ricci claim", disagreements == 0, std::to_string(disagreements) + " disagreements over 10000 samples",
         seconds_since(t0), 10);
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  double gap = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Sample s = draw(i);
    gap = std::max(gap, std::abs(boundary_identity_gap(decompose(s.T), s.mu)));
  }
  report(5, "boundary identity", gap <= 1e-12, fmt("max gap %.3e over 1000 states (tol 1e-12)", gap), seconds_since(t0),
         10);
}

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  EnsembleConfig cfg;  // seed 42, 1e4 runs, horizon 1, dt 1e-3
  cfg.count = 10000;
  const EnsembleReport rep = ensemble_cone_test(cfg);
  const OdeState graze{0.0, 4.0, {0, 0, 0}, Mat3::diag({2.0, 0.0, 0.0}), 2.0};
  const RunResult g = run_cone_trajectory(0, graze, cfg);
  const bool graze_ok = g.touches_two_sum > 0 && g.min_two_sum >= -1e-9 && g.worst_touch_rhs_two_sum >= -1e-9;
  const bool ok = rep.excursions_two_sum == 0 && rep.excursions_det == 0 && rep.touch_failures == 0 &&
                  rep.worst_touch_rhs >= -1e-9 && graze_ok;
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::ostringstream os;
  os << rep.runs.size() << " runs, excursions " << rep.excursions_two_sum << "/" << rep.excursions_det
     << ", worst min " << fmt("%.3e", rep.worst_min) << ", touches " << rep.touches << " worst rhs "
     << fmt("%.3e", rep.worst_touch_rhs) << ", blowups " << rep.blowups << "; grazing run touches "
     << g.touches_two_sum << " min " << fmt("%.3e", g.min_two_sum) << " rhs " << fmt("%.3e", g.worst_touch_rhs_two_sum)
     << "; threads " << threads;
  report(6, "ODE cone preservation", ok, os.str(), seconds_since(t0), threads > 1 ? 60 : 300);
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const OdeState y0 = OdeState::from_parts(decompose(random_kahler_curvature(5, 0.5)), 0.5);
  auto end = [&](int steps) {
    const Trajectory tr = integrate(y0, 0.5 / steps, steps, steps);
    return tr.states.back();
  };
  auto dist = [](const OdeState& a, const OdeState& b) {
    return std::max({std::abs(a.R - b.R), max_abs(a.s - b.s), max_abs(a.M - b.M)});
  };
  const OdeState a = end(10), b = end(20), c = end(40);
  const double ratio = dist(a, b) / dist(b, c);
  report(7, "RK4 order", ratio >= 12 && ratio <= 20, fmt("step-halving ratio %.3f (range [12, 20])", ratio),
         seconds_since(t0), 10);
}

double exact_t0000(double x, double eps) {
  const double c = std::cos(x), s = std::sin(x);
  return -(eps / 16) * c + (eps * eps / 64) * s * s / (1 - (eps / 4) * c);
}

double t0000_error(int n, double eps) {
  const TorusGrid grid(n);
  const LatticeGeometry geom(PotentialField::cos_x1(grid, eps));
  const std::size_t stride = static_cast<std::size_t>(n) * n * n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i) * stride;
    worst = std::max(worst, std::abs(geom.curvature_at(idx)(0, 0, 0, 0) - exact_t0000(grid.coordinate(idx, 0), eps)));
  }
  return worst;
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  // Flat potential: zero curvature, and a flow step leaves it at zero.
  const TorusGrid g16(16);
  const CurvatureField flat = curvature_from_potential(PotentialField::zero(g16));
  double flat_curv = 0.0;
  for (const auto& t : flat.curvature) flat_curv = std::max(flat_curv, max_abs(t));
  const PotentialField flat_next = potential_flow_step(PotentialField::zero(g16), 0.1 * g16.h() * g16.h(), 0.0);
  const double flat_step = flat_next.sup_abs();

  const TorusGrid g32(32);
  const double dual = ricci_dual_formula_defect(LatticeGeometry(PotentialField::cos_x1(g32, 0.05)));

  const double ratio = t0000_error(16, 0.05) / t0000_error(32, 0.05);

  PotentialField p = PotentialField::cos_x1(g16, 0.05);
  double prev = p.sup_abs();
  bool decreasing = true;
  for (int k = 0; k < 100; ++k) {
    p = potential_flow_step(p, 0.1 * g16.h() * g16.h(), 0.0);
    const double now = p.sup_abs();
    if (!(now < prev)) decreasing = false;
    prev = now;
  }
  const bool ok = flat_curv <= 1e-12 && flat_step <= 1e-12 && dual <= 1e-6 && ratio >= 12 && ratio <= 20 && decreasing;
  std::ostringstream os;
  os << "flat curvature " << fmt("%.1e", flat_curv) << " step " << fmt("%.1e", flat_step) << ", dual formula N=32 "
     << fmt("%.3e", dual) << " (tol 1e-6), refinement ratio " << fmt("%.3f", ratio) << ", sup|phi| "
     << (decreasing ? "strictly decreasing" : "NOT decreasing") << " over 100 steps (" << fmt("%.4e", prev) << ")";
  report(8, "lattice consistency", ok, os.str(), seconds_since(t0), 120);
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

void criterion_9() {
#ifdef KFLOW_CLI_PATH
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path work = fs::temp_directory_path() / "kahlerflow_acceptance";
  fs::remove_all(work);
  const std::string cli = KFLOW_CLI_PATH;
  struct Job {
    std::string name, args, env;
  };
  const Job jobs[] = {
      {"ode", "ode --seed 42 --set count=500 --set horizon=0.5", ""},
      {"ode", "ode --seed 42 --set count=500 --set horizon=0.5", "OMP_NUM_THREADS=1 "},
      {"lattice", "lattice --set grid_n=8 --set steps=10 --set snapshot_every=5", ""},
      {"identities", "identities --set samples=200 --set ricci_samples=1000", ""},
  };
  bool ok = true;
  std::string detail;
  std::map<std::string, std::map<std::string, std::string>> first;
  for (const auto& job : jobs) {
    const fs::path out = work / job.name;
    for (int rep = 0; rep < 2; ++rep) {
      fs::remove_all(out);
      const std::string cmd = job.env + cli + " " + job.args + " --output " + out.string() + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        ok = false;
        detail += job.name + " exited nonzero; ";
        continue;
      }
      const auto files = read_dir(out);
      auto it = first.find(job.name);
      if (it == first.end()) {
        first[job.name] = files;
      } else if (it->second != files) {
        ok = false;
        detail += job.name + " outputs differ; ";
      }
    }
  }
  int csvs = 0;
  for (const auto& [name, files] : first)
    for (const auto& [f, _] : files) csvs += f.ends_with(".csv");
  if (csvs < 2) ok = false;
  fs::remove_all(work);
  if (detail.empty()) detail = "all files byte-identical across repeats and thread counts (" + std::to_string(csvs) + " CSV)";
  report(9, "CLI determinism", ok, detail, seconds_since(t0), 120);
#else
  report(9, "CLI determinism", false, "CLI not built", 0.0, 120);
#endif
}

}  // namespace

int main() {
  criteria_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
