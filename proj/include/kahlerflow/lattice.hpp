// Kähler-Ricci flow on the flat torus T^4 = (R / 2 pi Z)^4 with complex
// coordinates z_j = x_j + i y_j, driven at the level of a periodic
// potential:
//
//   g_{\bar a b} = lambda delta_ab + d_{\bar a} d_b phi,
//   d_b = (d/dx_b - i d/dy_b) / 2,  d_{\bar a} = (d/dx_a + i d/dy_a) / 2.
//
// lambda is a spatially constant background scale (1 unless mu != 0).
// Derivatives are 4th-order central differences on the periodic grid; all
// second derivatives are compositions of the 5-point first-derivative
// stencil, so the discrete operators commute and the curvature keeps the
// Kähler symmetries to roundoff.
//
// Coordinate curvature, barred index first in each pair:
//   R_{\bar a b \bar c d} = -d_d d_{\bar c} g_{\bar a b}
//                           + g^{\bar q p} (d_d g_{\bar q b}) (d_{\bar c} g_{\bar a p}).
// With this sign the Fubini-Study metric has positive curvature.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kahlerflow/cone.hpp"
#include "kahlerflow/tensors.hpp"

namespace kflow {

class NonPositiveMetric : public std::runtime_error {
 public:
  NonPositiveMetric(std::size_t point, double eigenvalue);
  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t point_;
  double eigenvalue_;
};

class StabilityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis order (x1, y1, x2, y2); linear index ((i_x1 N + i_y1) N + i_x2) N + i_y2.
class TorusGrid {
 public:
  /// Throws std::invalid_argument unless n >= 8 and even.
  explicit TorusGrid(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return size_; }
  double coordinate(std::size_t idx, int axis) const { return h_ * axis_index(idx, axis); }
  int axis_index(std::size_t idx, int axis) const {
    return static_cast<int>((idx / stride_[axis]) % static_cast<std::size_t>(n_));
  }
  std::size_t shift(std::size_t idx, int axis, int offset) const;

 private:
  int n_;
  double h_;
  std::size_t size_;
  std::size_t stride_[4];
};

inline constexpr double kMetricEigenFloor = 1e-8;

struct PotentialField {
  TorusGrid grid{8};
  std::vector<double> phi;
  double background = 1.0;

  /// Samples f(x1, y1, x2, y2) and removes the mean.
  static PotentialField from_function(const TorusGrid& grid,
                                      const std::function<double(double, double, double, double)>& f);
  static PotentialField zero(const TorusGrid& grid);
  /// eps cos(x1)
  static PotentialField cos_x1(const TorusGrid& grid, double eps);
  /// eps (cos(x1) + cos(x2))
  static PotentialField cos_sum(const TorusGrid& grid, double eps);

  double mean() const;
  double sup_abs() const;
};

struct MetricField {
  TorusGrid grid{8};
  std::vector<HermitianForm2> g;
  double min_eigenvalue = 0.0;
};

/// Throws NonPositiveMetric if any eigenvalue is <= 1e-8.
MetricField metric_from_potential(const PotentialField& phi);

/// Per-point geometry evaluator over a fixed potential. Holds the metric
/// and log det g fields; curvature is evaluated on demand.
class LatticeGeometry {
 public:
  explicit LatticeGeometry(const PotentialField& phi);

  const TorusGrid& grid() const { return metric_.grid; }
  const MetricField& metric() const { return metric_; }

  /// Coordinate curvature R_{\bar a b \bar c d} at a point.
  KahlerCurvature curvature_at(std::size_t idx) const;
  /// g^{\bar c d}-trace of the coordinate curvature.
  HermitianForm2 ricci_at(std::size_t idx) const;
  /// -d_{\bar a} d_b log det g.
  HermitianForm2 ricci_log_det_at(std::size_t idx) const;
  double scalar_at(std::size_t idx) const;
  /// Curvature transported to the unitary frame g^{-1/2}.
  KahlerCurvature frame_curvature_at(std::size_t idx) const;

 private:
  MetricField metric_;
  std::vector<double> log_det_;
};

struct CurvatureField {
  TorusGrid grid{8};
  std::vector<KahlerCurvature> curvature;
  std::vector<HermitianForm2> ricci;
  std::vector<double> scalar;
};

CurvatureField curvature_from_potential(const PotentialField& phi);

/// sup over points and entries of |Ric (curvature trace) - Ric (log det)|.
double ricci_dual_formula_defect(const LatticeGeometry& geom);

/// e = g^{-1/2} by the 2x2 Hermitian closed form. Throws NonPositiveMetric.
Frame frame_from_metric(const HermitianForm2& g);

/// Largest dt / h^2 for which an explicit Euler step of the linearized
/// flow is stable on the identity metric (D1 composed with D1).
inline constexpr double kStabilityFactorMax = 1.0;

struct FlowOptions {
  double stability_factor_max = kStabilityFactorMax;
};

/// phi <- phi + dt (log det g - mean(log det g) + mu phi) and
/// lambda <- lambda (1 + mu dt), which induces d/dt g = -Ric + mu g.
/// Throws StabilityViolation when dt > stability_factor_max h^2 min eig(g).
PotentialField potential_flow_step(const PotentialField& phi, double dt, double mu, const FlowOptions& options = {});

struct FieldSummary {
  double min = 0.0;
  std::size_t argmin = 0;
  double max = 0.0;
  double mean = 0.0;
};

struct DiagnosticField {
  TorusGrid grid{8};
  std::vector<double> R;
  std::vector<double> s_norm;
  std::vector<double> det_indicator;
  std::vector<double> two_sum;

  FieldSummary summary_R;
  FieldSummary summary_s_norm;
  FieldSummary summary_det;
  FieldSummary summary_two_sum;
  double sup_abs_R = 0.0;
  double min_metric_eigenvalue = 0.0;
  double max_symmetry_violation = 0.0;  // frame curvature, all invariants
  double max_trace_identity_defect = 0.0;  // |trace(M) - R/2|
};

DiagnosticField diagnostics(const PotentialField& phi);

/// Reductions in a fixed order, independent of thread count.
FieldSummary summarize(const std::vector<double>& values);

/// One-line JSON header followed by little-endian float64 arrays in the
/// order of "fields".
inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  int n = 0;
  double h = 0.0;
  double t = 0.0;
  long step = 0;
  double background = 1.0;
  std::vector<std::string> fields;
  std::vector<std::vector<double>> data;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

}  // namespace kflow
