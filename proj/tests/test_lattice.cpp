#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "kahlerflow/lattice.hpp"
#include "kahlerflow/random.hpp"

using namespace kflow;

namespace {

// Exact R_{\bar 1 1 \bar 1 1} for phi = eps cos(x1), where
// g = diag(1 - (eps/4) cos x1, 1).
double exact_t0000(double x, double eps) {
  const double c = std::cos(x), s = std::sin(x);
  return -(eps / 16) * c + (eps * eps / 64) * s * s / (1 - (eps / 4) * c);
}

// Fourier symbol of the 5-point first-derivative stencil at wavenumber 1.
double stencil_symbol(double h) { return (8 * std::sin(h) - std::sin(2 * h)) / (6 * h); }

// Points along the x1 axis with the other indices at zero.
std::size_t x1_point(const TorusGrid& g, int i) {
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n()) * g.n() * g.n();
}

double t0000_error(int n, double eps) {
  const TorusGrid grid(n);
  const LatticeGeometry geom(PotentialField::cos_x1(grid, eps));
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = x1_point(grid, i);
    worst = std::max(worst, std::abs(geom.curvature_at(idx)(0, 0, 0, 0) - exact_t0000(grid.coordinate(idx, 0), eps)));
  }
  return worst;
}

}  // namespace

TEST_CASE("grid layout") {
  CHECK_THROWS_AS(TorusGrid(6), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid(9), std::invalid_argument);
  const TorusGrid g(8);
  CHECK(g.size() == 4096);
  CHECK(g.h() == doctest::Approx(2 * M_PI / 8));
  const std::size_t idx = ((3 * 8 + 1) * 8 + 7) * 8 + 2;
  CHECK(g.axis_index(idx, 0) == 3);
  CHECK(g.axis_index(idx, 1) == 1);
  CHECK(g.axis_index(idx, 2) == 7);
  CHECK(g.axis_index(idx, 3) == 2);
  CHECK(g.axis_index(g.shift(idx, 2, 1), 2) == 0);
  CHECK(g.axis_index(g.shift(idx, 0, -4), 0) == 7);
  CHECK(g.shift(g.shift(idx, 3, 5), 3, -5) == idx);
}

TEST_CASE("potentials are mean free") {
  const TorusGrid g(8);
  CHECK(std::abs(PotentialField::cos_x1(g, 0.3).mean()) <= 1e-16);
  const PotentialField f = PotentialField::from_function(g, [](double a, double b, double c, double d) {
    return 1.0 + std::sin(a) * std::cos(b) + c * 0.0 + d * 0.0;
  });
  CHECK(std::abs(f.mean()) <= 1e-15);
  CHECK(PotentialField::cos_sum(g, 0.2).sup_abs() == doctest::Approx(0.4));
}

TEST_CASE("flat potential has zero curvature and is stationary") {
  const TorusGrid grid(8);
  const PotentialField zero = PotentialField::zero(grid);
  const CurvatureField cf = curvature_from_potential(zero);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(max_abs(cf.curvature[i]) <= 1e-12);
    CHECK(std::abs(cf.scalar[i]) <= 1e-12);
  }
  PotentialField p = zero;
  for (int k = 0; k < 10; ++k) p = potential_flow_step(p, 0.1 * grid.h() * grid.h(), 0.0);
  CHECK(p.sup_abs() <= 1e-12);
}

TEST_CASE("discrete metric matches the stencil symbol") {
  // g00 = 1 - (eps/4) sigma(h)^2 cos x1 exactly, sigma the stencil symbol.
  const double eps = 0.1;
  double err[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    const TorusGrid grid(k == 0 ? 16 : 32);
    const MetricField m = metric_from_potential(PotentialField::cos_x1(grid, eps));
    const double sig2 = std::pow(stencil_symbol(grid.h()), 2);
    double vs_symbol = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 97) {
      const double x = grid.coordinate(i, 0);
      vs_symbol = std::max(vs_symbol, std::abs(m.g[i](0, 0).real() - (1 - (eps / 4) * sig2 * std::cos(x))));
      vs_symbol = std::max(vs_symbol, max_abs(m.g[i] - Mat2c::diag(m.g[i](0, 0), 1.0)));
      err[k] = std::max(err[k], std::abs(m.g[i](0, 0).real() - (1 - (eps / 4) * std::cos(x))));
    }
    CHECK(vs_symbol <= 1e-14);
    CHECK(err[k] <= (eps / 4) * (1 - sig2) + 1e-14);
  }
  // 4th order in h.
  CHECK(err[0] / err[1] >= 12.0);
  CHECK(err[0] / err[1] <= 20.0);
  CHECK(err[1] <= 3e-6);
}

TEST_CASE("curvature converges to the exact profile at 4th order") {
  const double e16 = t0000_error(16, 0.05);
  const double e32 = t0000_error(32, 0.05);
  CHECK(e16 / e32 >= 12.0);
  CHECK(e16 / e32 <= 20.0);
}

TEST_CASE("x1-only potential gives x1-only curvature") {
  const TorusGrid grid(8);
  const LatticeGeometry geom(PotentialField::cos_x1(grid, 0.2));
  SplitMix64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const KahlerCurvature base = geom.curvature_at(x1_point(grid, i));
    for (int k = 0; k < 20; ++k) {
      std::size_t idx = x1_point(grid, i);
      for (int axis = 1; axis < 4; ++axis) idx = grid.shift(idx, axis, static_cast<int>(rng.next() % 8));
      worst = std::max(worst, max_abs(geom.curvature_at(idx) - base));
    }
    // Only the (0,0,0,0) entry is nonzero.
    for (int e = 1; e < 16; ++e) CHECK(std::abs(base.data()[e]) <= 1e-15);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("curvature symmetries and dual formula on a generic potential") {
  const TorusGrid grid(16);
  const LatticeGeometry geom(PotentialField::from_function(grid, [](double a, double b, double c, double d) {
    return 0.05 * (std::cos(a + c) + std::sin(b) * std::cos(d) + 0.5 * std::sin(a - d));
  }));
  for (std::size_t i = 0; i < grid.size(); i += 131) {
    CHECK(validate_curvature_symmetries(geom.curvature_at(i), 1e-13).valid);
    CHECK(validate_curvature_symmetries(geom.frame_curvature_at(i), 1e-13).valid);
  }
  CHECK(ricci_dual_formula_defect(geom) <= 1e-4);
}

TEST_CASE("constant shift of the potential changes nothing") {
  const TorusGrid grid(8);
  const PotentialField p = PotentialField::cos_sum(grid, 0.3);
  PotentialField q = p;
  for (double& v : q.phi) v += 0.75;
  const LatticeGeometry a(p), b(q);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); i += 7) worst = std::max(worst, max_abs(a.curvature_at(i) - b.curvature_at(i)));
  CHECK(worst <= 1e-13);
  const PotentialField pa = potential_flow_step(p, 0.05 * grid.h() * grid.h(), 0.0);
  const PotentialField pb = potential_flow_step(q, 0.05 * grid.h() * grid.h(), 0.0);
  double step = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) step = std::max(step, std::abs((pa.phi[i] - pa.mean()) - (pb.phi[i] - pb.mean())));
  CHECK(step <= 1e-13);
}

TEST_CASE("positivity of the metric") {
  const TorusGrid grid(8);
  CHECK_NOTHROW(metric_from_potential(PotentialField::cos_sum(grid, 2.0)));
  CHECK_THROWS_AS(metric_from_potential(PotentialField::cos_sum(grid, 5.0)), NonPositiveMetric);
  try {
    metric_from_potential(PotentialField::cos_sum(grid, 5.0));
  } catch (const NonPositiveMetric& e) {
    CHECK(e.eigenvalue() <= kMetricEigenFloor);
    CHECK(e.point() < grid.size());
  }
}

TEST_CASE("flow step keeps the mean and decays the potential") {
  const TorusGrid grid(16);
  PotentialField p = PotentialField::cos_x1(grid, 0.05);
  const double dt = 0.1 * grid.h() * grid.h();
  double prev = p.sup_abs();
  bool decreasing = true;
  for (int k = 0; k < 100; ++k) {
    p = potential_flow_step(p, dt, 0.0);
    const double now = p.sup_abs();
    if (!(now < prev)) decreasing = false;
    prev = now;
  }
  CHECK(decreasing);
  CHECK(std::abs(p.mean()) <= 1e-15);
  CHECK(p.background == 1.0);
}

TEST_CASE("stability limit") {
  const TorusGrid grid(8);
  const PotentialField p = PotentialField::cos_x1(grid, 0.05);
  const double h2 = grid.h() * grid.h();
  CHECK_NOTHROW(potential_flow_step(p, 0.5 * h2, 0.0));
  CHECK_THROWS_AS(potential_flow_step(p, 1.5 * h2, 0.0), StabilityViolation);
  CHECK_THROWS_AS(potential_flow_step(p, 0.5 * h2, 0.0, FlowOptions{0.1}), StabilityViolation);
}

TEST_CASE("step induces d/dt g = -Ric + mu g") {
  const TorusGrid grid(16);
  const double mu = 0.3;
  const PotentialField p = PotentialField::cos_sum(grid, 0.1);
  const double dt = 1e-4;
  const PotentialField q = potential_flow_step(p, dt, mu);
  CHECK(q.background == doctest::Approx(1.0 + mu * dt));
  const LatticeGeometry geom(p);
  const MetricField g1 = metric_from_potential(q);
  double vs_trace = 0.0, vs_logdet = 0.0;
  for (std::size_t i = 0; i < grid.size(); i += 37) {
    const Mat2c gdot = (1.0 / dt) * (g1.g[i] - geom.metric().g[i]);
    const Mat2c target = mu * geom.metric().g[i];
    vs_trace = std::max(vs_trace, max_abs(gdot - (target - geom.ricci_at(i))));
    vs_logdet = std::max(vs_logdet, max_abs(gdot - (target - geom.ricci_log_det_at(i))));
  }
  CHECK(vs_trace <= 1e-3);
  CHECK(vs_logdet <= 1e-9);
}

TEST_CASE("unitary frame from the metric") {
  const Frame f = frame_from_metric(Mat2c::diag(4.0, 1.0));
  CHECK(max_abs(f.e - Mat2c::diag(0.5, 1.0)) <= 1e-15);
  SplitMix64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cplx b(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
    const HermitianForm2 g = Mat2c::from_rows(rng.uniform(1.0, 3.0), b, std::conj(b), rng.uniform(1.0, 3.0));
    worst = std::max(worst, orthonormality_defect(frame_from_metric(g), g));
  }
  CHECK(worst <= 1e-13);
  CHECK_THROWS_AS(frame_from_metric(Mat2c::diag(1.0, -1.0)), NonPositiveMetric);
}

TEST_CASE("diagnostics") {
  const TorusGrid grid(8);
  const DiagnosticField zero = diagnostics(PotentialField::zero(grid));
  CHECK(zero.sup_abs_R <= 1e-12);
  CHECK(zero.min_metric_eigenvalue == doctest::Approx(1.0));

  const DiagnosticField d = diagnostics(PotentialField::cos_x1(grid, 0.1));
  CHECK(d.max_symmetry_violation <= 1e-13);
  CHECK(d.max_trace_identity_defect <= 1e-13);
  CHECK(d.R.size() == grid.size());
  CHECK(d.summary_R.min <= d.summary_R.mean);
  CHECK(d.summary_R.mean <= d.summary_R.max);
  CHECK(d.R[d.summary_R.argmin] == d.summary_R.min);

  const FieldSummary s = summarize({3.0, -1.0, 2.0, -1.0});
  CHECK(s.min == -1.0);
  CHECK(s.argmin == 1);
  CHECK(s.max == 3.0);
  CHECK(s.mean == 0.75);
}

TEST_CASE("snapshot round trip") {
  Snapshot snap;
  snap.n = 8;
  snap.h = 2 * M_PI / 8;
  snap.t = 0.125;
  snap.step = 7;
  snap.background = 1.25;
  snap.fields = {"phi", "R"};
  snap.data = {std::vector<double>(4096, 0.5), std::vector<double>(4096, -1.0 / 3.0)};
  const auto path = (std::filesystem::temp_directory_path() / "kflow_snapshot_test.bin").string();
  write_snapshot(path, snap);
  const Snapshot back = read_snapshot(path);
  CHECK(back.n == 8);
  CHECK(back.h == snap.h);
  CHECK(back.t == 0.125);
  CHECK(back.step == 7);
  CHECK(back.background == 1.25);
  CHECK(back.fields == snap.fields);
  CHECK(back.data == snap.data);
  std::filesystem::remove(path);
  CHECK_THROWS(read_snapshot(path));
}
