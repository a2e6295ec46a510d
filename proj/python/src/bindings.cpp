// Python module kahlerflow._core: thin wrappers, numpy in and out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kahlerflow/cone.hpp"
#include "kahlerflow/decomp.hpp"
#include "kahlerflow/identities.hpp"
#include "kahlerflow/lattice.hpp"
#include "kahlerflow/ode.hpp"
#include "kahlerflow/reactions.hpp"

namespace py = pybind11;
using namespace kflow;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CArray to_numpy(const KahlerCurvature& t) {
  CArray out({2, 2, 2, 2});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

KahlerCurvature from_numpy(const CArray& a) {
  if (a.size() != 16) throw py::value_error("curvature must have shape (2, 2, 2, 2)");
  KahlerCurvature t;
  std::copy(a.data(), a.data() + 16, t.data().begin());
  return t;
}

DArray mat3_to_numpy(const Mat3& m) {
  DArray out({3, 3});
  std::copy(m.v.begin(), m.v.end(), out.mutable_data());
  return out;
}

Mat3 mat3_from_numpy(const DArray& a) {
  if (a.size() != 9) throw py::value_error("matrix must have shape (3, 3)");
  Mat3 m;
  std::copy(a.data(), a.data() + 9, m.v.begin());
  return m;
}

Vec3 vec3_from(const DArray& a) {
  if (a.size() != 3) throw py::value_error("vector must have length 3");
  return {a.data()[0], a.data()[1], a.data()[2]};
}

// Explicit strides: the count constructor gave a zero stride with pybind11 2.9.
DArray to_numpy_1d(const double* data, std::size_t n) {
  return DArray(std::vector<py::ssize_t>{static_cast<py::ssize_t>(n)}, std::vector<py::ssize_t>{sizeof(double)}, data);
}

DArray vec3_to_numpy(const Vec3& v) { return to_numpy_1d(v.data(), 3); }

py::tuple parts_tuple(double R, const Vec3& s, const Mat3& M) {
  return py::make_tuple(R, vec3_to_numpy(s), mat3_to_numpy(M));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kahler curvature reactions, cone checks and torus flow";
  m.attr("convention_version") = "kahlerflow-conventions-1";

  m.def("random_kahler_curvature", [](std::uint64_t seed, double scale) {
    return to_numpy(random_kahler_curvature(seed, scale));
  }, py::arg("seed"), py::arg("scale") = 1.0);
  m.def("constant_hsc_curvature", [](double c) { return to_numpy(constant_hsc_curvature(c)); }, py::arg("c") = 1.0);
  m.def("product_space_curvature", [](double k) { return to_numpy(product_space_curvature(k)); }, py::arg("k") = 2.0);
  m.def("symmetry_violations", [](const CArray& t) {
    const SymmetryReport r = validate_curvature_symmetries(from_numpy(t), 1e-12);
    return py::dict(py::arg("pair") = r.pair, py::arg("kahler") = r.kahler, py::arg("reality") = r.reality,
                    py::arg("valid") = r.valid);
  });

  m.def("decompose", [](const CArray& t) {
    const CurvatureParts p = decompose(from_numpy(t));
    return parts_tuple(p.R, p.s, p.M);
  }, "(R, s, M) of a curvature tensor");
  m.def("reconstruct", [](double R, const DArray& s, const DArray& M) {
    return to_numpy(reconstruct({R, vec3_from(s), mat3_from_numpy(M)}));
  });
  m.def("sharp", [](const DArray& M) { return mat3_to_numpy(sharp(mat3_from_numpy(M))); });

  m.def("reaction_riemann_frame", [](const CArray& t, double mu) {
    return to_numpy(reaction_riemann_frame({from_numpy(t), mu}));
  });
  m.def("reaction_riemann_coord", [](const CArray& t, double mu) {
    return to_numpy(reaction_riemann_coord({from_numpy(t), mu}));
  });
  m.def("frame_rotation_terms", [](const CArray& t, double mu) {
    return to_numpy(frame_rotation_terms({from_numpy(t), mu}));
  });
  m.def("reaction_system_s", [](double R, const DArray& s, const DArray& M, double mu) {
    const PartsRate r = reaction_system_s({R, vec3_from(s), mat3_from_numpy(M)}, mu);
    return parts_tuple(r.dR, r.ds, r.dM);
  });

  m.def("two_smallest_sum", [](const DArray& M) { return two_smallest_sum(mat3_from_numpy(M)).value; });
  m.def("det_indicator", [](double R, const DArray& s) { return det_indicator({R, vec3_from(s), Mat3{}}); });
  m.def("is_ricci_nonneg", [](double A, const DArray& B, double tol) { return is_ricci_nonneg(A, vec3_from(B), tol); },
        py::arg("A"), py::arg("B"), py::arg("tol") = kPredicateTol);
  m.def("boundary_identity_gap", [](double R, const DArray& s, const DArray& M, double mu) {
    return boundary_identity_gap({R, vec3_from(s), mat3_from_numpy(M)}, mu);
  });
  m.def("eigen_sum_rhs", [](const DArray& M, const DArray& s, double mu) {
    return eigen_sum_rhs(mat3_from_numpy(M), vec3_from(s), mu);
  });

  m.def("integrate", [](double R, const DArray& s, const DArray& M, double mu, double dt, int steps) {
    const Trajectory tr = integrate({0.0, R, vec3_from(s), mat3_from_numpy(M), mu}, dt, steps, 1);
    const OdeState& y = tr.states.back();
    py::dict out;
    out["t"] = y.t;
    out["R"] = y.R;
    out["s"] = vec3_to_numpy(y.s);
    out["M"] = mat3_to_numpy(y.M);
    out["blew_up"] = tr.blew_up;
    out["t_blowup"] = tr.t_blowup;
    return out;
  }, py::arg("R"), py::arg("s"), py::arg("M"), py::arg("mu"), py::arg("dt"), py::arg("steps"));

  m.def("ensemble_cone_test", [](std::uint64_t seed, int count, double horizon, double dt) {
    EnsembleConfig cfg;
    cfg.seed = seed;
    cfg.count = count;
    cfg.horizon = horizon;
    cfg.dt = dt;
    EnsembleReport rep;
    {
      py::gil_scoped_release release;
      rep = ensemble_cone_test(cfg);
    }
    py::dict out;
    out["runs"] = rep.runs.size();
    out["excursions_two_sum"] = rep.excursions_two_sum;
    out["excursions_det"] = rep.excursions_det;
    out["violations_two_sum"] = rep.violations_two_sum;
    out["violations_det"] = rep.violations_det;
    out["touch_failures"] = rep.touch_failures;
    out["blowups"] = rep.blowups;
    out["min_two_sum"] = rep.min_two_sum;
    out["min_det"] = rep.min_det;
    out["worst_min"] = rep.worst_min;
    out["runs_csv"] = runs_csv(rep);
    return out;
  }, py::arg("seed") = 42, py::arg("count") = 100, py::arg("horizon") = 1.0, py::arg("dt") = 1e-3);

  m.def("run_identity_suites", [](std::uint64_t seed, long samples) {
    IdentityOptions o;
    o.seed = seed;
    o.samples = samples;
    py::list out;
    for (const auto& r : run_identity_suites(o, {}))
      out.append(py::dict(py::arg("suite") = r.suite, py::arg("max_violation") = r.max_violation,
                          py::arg("tolerance") = r.tolerance, py::arg("pass") = r.pass));
    return out;
  }, py::arg("seed") = 1, py::arg("samples") = 1000);

  m.def("lattice_cos_x1", [](int n, double eps) {
    const TorusGrid grid(n);
    const LatticeGeometry geom(PotentialField::cos_x1(grid, eps));
    const std::size_t stride = static_cast<std::size_t>(n) * n * n;
    std::vector<double> x(n), t0000(n);
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i) * stride;
      x[i] = grid.coordinate(idx, 0);
      t0000[i] = geom.curvature_at(idx)(0, 0, 0, 0).real();
    }
    return py::make_tuple(to_numpy_1d(x.data(), x.size()), to_numpy_1d(t0000.data(), t0000.size()),
                          ricci_dual_formula_defect(geom));
  }, "x1 samples, R_{1111} along x1 and the dual-formula defect for phi = eps cos(x1)");

  m.def("lattice_flow_sup", [](int n, double eps, int steps, double dt_factor) {
    const TorusGrid grid(n);
    PotentialField p = PotentialField::cos_x1(grid, eps);
    std::vector<double> sup{p.sup_abs()};
    for (int k = 0; k < steps; ++k) {
      p = potential_flow_step(p, dt_factor * grid.h() * grid.h(), 0.0);
      sup.push_back(p.sup_abs());
    }
    return sup;
  }, py::arg("n"), py::arg("eps"), py::arg("steps"), py::arg("dt_factor") = 0.1);
}
