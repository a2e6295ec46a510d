#include "kahlerflow/cone.hpp"

#include <cmath>

namespace kflow {

HermitianForm2 ricci_matrix_p(double A, const Vec3& B) {
  const cplx i{0.0, 1.0};
  return Mat2c::from_rows(A + B[0], B[1] - i * B[2], B[1] + i * B[2], A - B[0]);
}

bool is_ricci_nonneg(double A, const Vec3& B, double tol) {
  return A >= -tol && A * A - dot(B, B) >= -tol;
}

std::array<double, 2> hermitian_eigenvalues(const HermitianForm2& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
  return {mean - radius, mean + radius};
}

TwoSmallest two_smallest_sum(const Mat3& m) {
  const SymEigen eig = eigen_sym3(m);
  return {eig.values[0] + eig.values[1], {eig.vectors[0], eig.vectors[1]}};
}

Mat3 project_to_two_sum_boundary(const Mat3& m) {
  const TwoSmallest ts = two_smallest_sum(m);
  const Mat3 p = Mat3::outer(ts.witnesses[0], ts.witnesses[0]) + Mat3::outer(ts.witnesses[1], ts.witnesses[1]);
  return symmetrized(m - (0.5 * ts.value) * p);
}

double det_indicator(const CurvatureParts& parts) {
  return 0.5 * parts.R * parts.R - dot(parts.s, parts.s);
}

double det_indicator_remainder(const CurvatureParts& parts, double mu) {
  const PartsRate rate = reaction_system_s(parts, mu);
  const double d_det = parts.R * rate.dR - 2.0 * dot(parts.s, rate.ds);
  return d_det - (parts.R - 2.0 * mu) * det_indicator(parts);
}

double boundary_identity_gap(const CurvatureParts& parts, double mu) {
  const SymEigen eig = eigen_sym3(parts.M);
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double sk = dot(eig.vectors[k], parts.s);
    weighted += (0.5 * parts.R - eig.values[k]) * sk * sk;
  }
  return det_indicator_remainder(parts, mu) - 2.0 * weighted;
}

double eigen_sum_rhs(const Mat3& m, const Vec3& s, double mu) {
  const SymEigen eig = eigen_sym3(m);
  const double m1 = eig.values[0], m2 = eig.values[1], m3 = eig.values[2];
  const double sum = m1 + m2;
  const double t1 = dot(s, eig.vectors[0]);
  const double t2 = dot(s, eig.vectors[1]);
  return -mu * sum + m1 * m1 + m2 * m2 + kSharpBoundaryCoefficient * m3 * sum + 0.5 * (t1 * t1 + t2 * t2);
}

ConeReport cone_report(const CurvatureParts& parts, double mu, double tol) {
  ConeReport rep;
  const SymEigen eig = eigen_sym3(parts.M);
  rep.eigenvalues = eig.values;
  rep.two_sum = eig.values[0] + eig.values[1];
  rep.det_indicator = det_indicator(parts);
  // A = R/2 and |B|^2 = |s|^2 / 2, so A^2 - |B|^2 = det_indicator / 2.
  rep.ricci_nonneg = parts.R / 2.0 >= -tol && rep.det_indicator / 2.0 >= -tol;
  rep.boundary_gap = boundary_identity_gap(parts, mu);
  return rep;
}

}  // namespace kflow
