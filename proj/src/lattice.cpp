#include "kahlerflow/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "kahlerflow/decomp.hpp"

namespace kflow {

namespace {

constexpr std::array<double, 5> kD1Weights{1.0, -8.0, 0.0, 8.0, -1.0};  // / (12 h), offsets -2..2
constexpr cplx kI{0.0, 1.0};

// Linear-index offsets of the neighbours of one point: off[axis][k + 4] is
// the move by k in -4..4 along axis, wrapped.
struct Neighbours {
  std::array<std::array<std::ptrdiff_t, 9>, 4> off{};

  Neighbours(const TorusGrid& grid, std::size_t idx) {
    for (int axis = 0; axis < 4; ++axis)
      for (int k = -4; k <= 4; ++k)
        off[axis][k + 4] = static_cast<std::ptrdiff_t>(grid.shift(idx, axis, k)) - static_cast<std::ptrdiff_t>(idx);
  }
};

// Real-axis derivatives of a field sampled through `at(idx)`.
template <typename Value, typename Access>
Value first_derivative(const TorusGrid& grid, std::size_t idx, const Neighbours& nb, int axis, Access at) {
  Value acc{};
  for (int k = 0; k < 5; ++k) {
    if (kD1Weights[k] == 0.0) continue;
    acc += kD1Weights[k] * at(idx + nb.off[axis][k + 2]);
  }
  return acc * (1.0 / (12.0 * grid.h()));
}

template <typename Value, typename Access>
Value second_derivative(const TorusGrid& grid, std::size_t idx, const Neighbours& nb, int a1, int a2, Access at) {
  Value acc{};
  for (int k = 0; k < 5; ++k) {
    if (kD1Weights[k] == 0.0) continue;
    for (int l = 0; l < 5; ++l) {
      if (kD1Weights[l] == 0.0) continue;
      const std::ptrdiff_t move =
          a1 == a2 ? nb.off[a1][k + l] : nb.off[a1][k + 2] + nb.off[a2][l + 2];
      acc += (kD1Weights[k] * kD1Weights[l]) * at(idx + move);
    }
  }
  const double h12 = 12.0 * grid.h();
  return acc * (1.0 / (h12 * h12));
}

// Real Hessian over the four axes (symmetric, all entries filled).
template <typename Value, typename Access>
std::array<std::array<Value, 4>, 4> hessian(const TorusGrid& grid, std::size_t idx, const Neighbours& nb, Access at) {
  std::array<std::array<Value, 4>, 4> hs{};
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      hs[a][b] = second_derivative<Value>(grid, idx, nb, a, b, at);
      hs[b][a] = hs[a][b];
    }
  return hs;
}

// d_{\bar a} d_b from a real Hessian.
template <typename Value>
cplx dbar_d(const std::array<std::array<Value, 4>, 4>& hs, int a, int b) {
  const int xa = 2 * a, ya = 2 * a + 1, xb = 2 * b, yb = 2 * b + 1;
  return 0.25 * (cplx(hs[xa][xb]) + cplx(hs[ya][yb]) + kI * (cplx(hs[ya][xb]) - cplx(hs[xa][yb])));
}

double min_eigenvalue(const HermitianForm2& g) { return hermitian_eigenvalues(g)[0]; }

double sum_in_order(const std::vector<double>& v) {
  // Fixed-topology pairwise reduction over blocks of 1024.
  constexpr std::size_t kBlock = 1024;
  std::vector<double> partial;
  partial.reserve(v.size() / kBlock + 1);
  for (std::size_t start = 0; start < v.size(); start += kBlock) {
    double acc = 0.0;
    const std::size_t end = std::min(v.size(), start + kBlock);
    for (std::size_t i = start; i < end; ++i) acc += v[i];
    partial.push_back(acc);
  }
  while (partial.size() > 1) {
    std::vector<double> next((partial.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = partial[2 * i] + (2 * i + 1 < partial.size() ? partial[2 * i + 1] : 0.0);
    partial.swap(next);
  }
  return partial.empty() ? 0.0 : partial[0];
}

}  // namespace

NonPositiveMetric::NonPositiveMetric(std::size_t point, double eigenvalue)
    : std::runtime_error("NonPositiveMetric: metric eigenvalue " + std::to_string(eigenvalue) + " at point " +
                         std::to_string(point)),
      point_(point),
      eigenvalue_(eigenvalue) {}

TorusGrid::TorusGrid(int n) : n_(n) {
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("TorusGrid: N must be even and >= 8");
  h_ = 2.0 * std::numbers::pi / n;
  const auto un = static_cast<std::size_t>(n);
  size_ = un * un * un * un;
  stride_[3] = 1;
  stride_[2] = un;
  stride_[1] = un * un;
  stride_[0] = un * un * un;
}

std::size_t TorusGrid::shift(std::size_t idx, int axis, int offset) const {
  const int i = axis_index(idx, axis);
  int j = (i + offset) % n_;
  if (j < 0) j += n_;
  return idx + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * stride_[axis];
}

PotentialField PotentialField::from_function(const TorusGrid& grid,
                                             const std::function<double(double, double, double, double)>& f) {
  PotentialField p;
  p.grid = grid;
  p.phi.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    p.phi[i] = f(grid.coordinate(i, 0), grid.coordinate(i, 1), grid.coordinate(i, 2), grid.coordinate(i, 3));
  const double m = p.mean();
  for (auto& x : p.phi) x -= m;
  return p;
}

PotentialField PotentialField::zero(const TorusGrid& grid) {
  PotentialField p;
  p.grid = grid;
  p.phi.assign(grid.size(), 0.0);
  return p;
}

PotentialField PotentialField::cos_x1(const TorusGrid& grid, double eps) {
  return from_function(grid, [eps](double x1, double, double, double) { return eps * std::cos(x1); });
}

PotentialField PotentialField::cos_sum(const TorusGrid& grid, double eps) {
  return from_function(grid, [eps](double x1, double, double x2, double) { return eps * (std::cos(x1) + std::cos(x2)); });
}

double PotentialField::mean() const { return phi.empty() ? 0.0 : sum_in_order(phi) / static_cast<double>(phi.size()); }

double PotentialField::sup_abs() const {
  double r = 0.0;
  for (double x : phi) r = std::max(r, std::abs(x));
  return r;
}

MetricField metric_from_potential(const PotentialField& p) {
  const TorusGrid& grid = p.grid;
  MetricField out;
  out.grid = grid;
  out.g.resize(grid.size());
  std::vector<double> eig(grid.size());
  const auto at = [&](std::size_t j) { return p.phi[j]; };
  const auto n = static_cast<std::ptrdiff_t>(grid.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const auto hs = hessian<double>(grid, i, Neighbours(grid, i), at);
    HermitianForm2 g;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g(a, b) = dbar_d(hs, a, b) + (a == b ? p.background : 0.0);
    g(0, 0) = g(0, 0).real();
    g(1, 1) = g(1, 1).real();
    out.g[i] = g;
    eig[i] = min_eigenvalue(g);
  }

  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (eig[i] <= kMetricEigenFloor) throw NonPositiveMetric(i, eig[i]);
    out.min_eigenvalue = std::min(out.min_eigenvalue, eig[i]);
  }
  return out;
}

LatticeGeometry::LatticeGeometry(const PotentialField& phi) : metric_(metric_from_potential(phi)) {
  log_det_.resize(metric_.g.size());
  for (std::size_t i = 0; i < log_det_.size(); ++i) log_det_[i] = std::log(metric_.g[i].det().real());
}

KahlerCurvature LatticeGeometry::curvature_at(std::size_t idx) const {
  const TorusGrid& grid = metric_.grid;
  const auto& gf = metric_.g;
  const HermitianForm2 ginv = gf[idx].inverse();

  // Derivatives of each metric entry.
  std::array<std::array<cplx, 4>, 4> first{};                       // [entry][axis]
  std::array<std::array<std::array<cplx, 4>, 4>, 4> second{};       // [entry][axis][axis]
  const Neighbours nb(grid, idx);
  for (int e : {0, 1, 3}) {
    const auto at = [&](std::size_t j) { return gf[j].v[e]; };
    for (int ax = 0; ax < 4; ++ax) first[e][ax] = first_derivative<cplx>(grid, idx, nb, ax, at);
    second[e] = hessian<cplx>(grid, idx, nb, at);
  }
  // g_{\bar 1 0} = conj(g_{\bar 0 1}); real derivatives commute with conj.
  for (int a = 0; a < 4; ++a) {
    first[2][a] = std::conj(first[1][a]);
    for (int b = 0; b < 4; ++b) second[2][a][b] = std::conj(second[1][a][b]);
  }
  const auto d_hol = [&](int e, int d) { return 0.5 * (first[e][2 * d] - kI * first[e][2 * d + 1]); };
  const auto d_anti = [&](int e, int c) { return 0.5 * (first[e][2 * c] + kI * first[e][2 * c + 1]); };
  // d_d d_{\bar c} of entry e.
  const auto dd = [&](int e, int c, int d) {
    const auto& hs = second[e];
    const int xc = 2 * c, yc = 2 * c + 1, xd = 2 * d, yd = 2 * d + 1;
    return 0.25 * (hs[xd][xc] + hs[yd][yc] + kI * (hs[xd][yc] - hs[yd][xc]));
  };
  const auto entry = [](int a, int b) { return 2 * a + b; };

  KahlerCurvature t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx acc = -dd(entry(a, b), c, d);
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
              acc += ginv(p, q) * d_hol(entry(q, b), d) * d_anti(entry(a, p), c);
          t(a, b, c, d) = acc;
        }
  return t;
}

HermitianForm2 LatticeGeometry::ricci_at(std::size_t idx) const {
  const KahlerCurvature t = curvature_at(idx);
  const HermitianForm2 ginv = metric_.g[idx].inverse();
  HermitianForm2 ric;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      cplx acc = 0.0;
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) acc += ginv(d, c) * t(a, b, c, d);
      ric(a, b) = acc;
    }
  return ric;
}

HermitianForm2 LatticeGeometry::ricci_log_det_at(std::size_t idx) const {
  const auto at = [&](std::size_t j) { return log_det_[j]; };
  const auto hs = hessian<double>(metric_.grid, idx, Neighbours(metric_.grid, idx), at);
  HermitianForm2 ric;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) ric(a, b) = -dbar_d(hs, a, b);
  return ric;
}

double LatticeGeometry::scalar_at(std::size_t idx) const {
  const HermitianForm2 ric = ricci_at(idx);
  const HermitianForm2 ginv = metric_.g[idx].inverse();
  return (ginv(1, 0) * ric(0, 1) + ginv(0, 1) * ric(1, 0) + ginv(0, 0) * ric(0, 0) + ginv(1, 1) * ric(1, 1)).real();
}

KahlerCurvature LatticeGeometry::frame_curvature_at(std::size_t idx) const {
  const Frame frame = frame_from_metric(metric_.g[idx]);
  const KahlerCurvature t = curvature_at(idx);
  const Mat2c& e = frame.e;
  KahlerCurvature out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx acc = 0.0;
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m)
                  acc += std::conj(e(j, a)) * e(k, b) * std::conj(e(l, c)) * e(m, d) * t(j, k, l, m);
          out(a, b, c, d) = acc;
        }
  return out;
}

CurvatureField curvature_from_potential(const PotentialField& phi) {
  const LatticeGeometry geom(phi);
  CurvatureField out;
  out.grid = geom.grid();
  const std::size_t size = geom.grid().size();
  out.curvature.resize(size);
  out.ricci.resize(size);
  out.scalar.resize(size);
  const auto n = static_cast<std::ptrdiff_t>(size);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto i = static_cast<std::size_t>(si);
    out.curvature[i] = geom.curvature_at(i);
    out.ricci[i] = geom.ricci_at(i);
    out.scalar[i] = geom.scalar_at(i);
  }
  return out;
}

double ricci_dual_formula_defect(const LatticeGeometry& geom) {
  const std::size_t size = geom.grid().size();
  std::vector<double> defect(size);
  const auto n = static_cast<std::ptrdiff_t>(size);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto i = static_cast<std::size_t>(si);
    defect[i] = max_abs(geom.ricci_at(i) - geom.ricci_log_det_at(i));
  }
  return *std::max_element(defect.begin(), defect.end());
}

Frame frame_from_metric(const HermitianForm2& g) {
  const double lo = min_eigenvalue(g);
  if (!(lo > kMetricEigenFloor)) throw NonPositiveMetric(0, lo);
  // sqrt(g) = (g + sqrt(det) I) / sqrt(tr + 2 sqrt(det)) for 2x2 positive g.
  const double root_det = std::sqrt(g.det().real());
  const double denom = std::sqrt(g.trace().real() + 2.0 * root_det);
  const Mat2c root = (1.0 / denom) * (g + root_det * Mat2c::identity());
  return Frame{root.inverse()};
}

PotentialField potential_flow_step(const PotentialField& p, double dt, double mu, const FlowOptions& options) {
  const MetricField metric = metric_from_potential(p);
  const double h = p.grid.h();
  const double bound = options.stability_factor_max * h * h * metric.min_eigenvalue;
  if (!(dt > 0.0) || dt > bound) {
    throw StabilityViolation("potential_flow_step: dt " + std::to_string(dt) + " outside (0, " +
                             std::to_string(bound) + "]");
  }
  std::vector<double> log_det(metric.g.size());
  for (std::size_t i = 0; i < log_det.size(); ++i) log_det[i] = std::log(metric.g[i].det().real());
  const double mean_log_det = sum_in_order(log_det) / static_cast<double>(log_det.size());

  PotentialField next = p;
  for (std::size_t i = 0; i < next.phi.size(); ++i) next.phi[i] += dt * (log_det[i] - mean_log_det + mu * p.phi[i]);
  const double drift = next.mean();
  for (auto& x : next.phi) x -= drift;
  next.background = p.background * (1.0 + mu * dt);
  return next;
}

FieldSummary summarize(const std::vector<double>& values) {
  FieldSummary s;
  if (values.empty()) return s;
  s.min = values[0];
  s.max = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < s.min) {
      s.min = values[i];
      s.argmin = i;
    }
    s.max = std::max(s.max, values[i]);
  }
  s.mean = sum_in_order(values) / static_cast<double>(values.size());
  return s;
}

DiagnosticField diagnostics(const PotentialField& phi) {
  const LatticeGeometry geom(phi);
  const std::size_t size = geom.grid().size();
  DiagnosticField out;
  out.grid = geom.grid();
  out.R.resize(size);
  out.s_norm.resize(size);
  out.det_indicator.resize(size);
  out.two_sum.resize(size);
  std::vector<double> sym(size), trace_defect(size);

  const auto n = static_cast<std::ptrdiff_t>(size);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const KahlerCurvature t = geom.frame_curvature_at(i);
    const SymmetryReport rep = validate_curvature_symmetries(t, 0.0);
    sym[i] = std::max({rep.pair, rep.kahler, rep.reality});
    const CurvatureParts parts = project_parts(t);
    out.R[i] = parts.R;
    out.s_norm[i] = norm(parts.s);
    out.det_indicator[i] = det_indicator(parts);
    out.two_sum[i] = two_smallest_sum(parts.M).value;
    trace_defect[i] = std::abs(parts.M.trace() - parts.R / 2.0);
  }

  out.summary_R = summarize(out.R);
  out.summary_s_norm = summarize(out.s_norm);
  out.summary_det = summarize(out.det_indicator);
  out.summary_two_sum = summarize(out.two_sum);
  for (std::size_t i = 0; i < size; ++i) {
    out.sup_abs_R = std::max(out.sup_abs_R, std::abs(out.R[i]));
    out.max_symmetry_violation = std::max(out.max_symmetry_violation, sym[i]);
    out.max_trace_identity_defect = std::max(out.max_trace_identity_defect, trace_defect[i]);
  }
  out.min_metric_eigenvalue = geom.metric().min_eigenvalue;
  return out;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");
  nlohmann::ordered_json header;
  header["format"] = "kahlerflow-snapshot";
  header["version"] = kSnapshotVersion;
  header["N"] = snap.n;
  header["h"] = snap.h;
  header["t"] = snap.t;
  header["step"] = snap.step;
  header["background"] = snap.background;
  header["endianness"] = "little";
  header["dtype"] = "float64";
  header["index_order"] = "((i_x1*N + i_y1)*N + i_x2)*N + i_y2";
  header["fields"] = snap.fields;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  const std::string line = header.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (const auto& field : snap.data)
    out.write(reinterpret_cast<const char*>(field.data()), static_cast<std::streamsize>(field.size() * sizeof(double)));
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  if (header.at("format") != "kahlerflow-snapshot" || header.at("version") != kSnapshotVersion)
    throw std::runtime_error("read_snapshot: unsupported format in " + path);
  Snapshot snap;
  snap.n = header.at("N");
  snap.h = header.at("h");
  snap.t = header.at("t");
  snap.step = header.at("step");
  snap.background = header.at("background");
  snap.fields = header.at("fields").get<std::vector<std::string>>();
  const std::size_t count = static_cast<std::size_t>(snap.n) * snap.n * snap.n * snap.n;
  for (std::size_t f = 0; f < snap.fields.size(); ++f) {
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("read_snapshot: truncated field " + snap.fields[f]);
    snap.data.push_back(std::move(data));
  }
  return snap;
}

}  // namespace kflow
