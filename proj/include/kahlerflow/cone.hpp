// Positivity predicates for the Ricci form and the traceless curvature
// operator, and the algebraic boundary identities used by the maximum
// principle.

#pragma once

#include <array>

#include "kahlerflow/decomp.hpp"
#include "kahlerflow/linalg3.hpp"
#include "kahlerflow/reactions.hpp"

namespace kflow {

inline constexpr double kPredicateTol = 1e-10;

struct ConeReport {
  bool ricci_nonneg = false;
  double det_indicator = 0.0;  // R^2/2 - |S|^2
  Vec3 eigenvalues{};          // ascending m1 <= m2 <= m3
  double two_sum = 0.0;        // m1 + m2
  double boundary_gap = 0.0;
};

/// P = [[A + B1, B2 - i B3], [B2 + i B3, A - B1]].
HermitianForm2 ricci_matrix_p(double A, const Vec3& B);

/// A >= -tol and A^2 - |B|^2 >= -tol.
bool is_ricci_nonneg(double A, const Vec3& B, double tol = kPredicateTol);

/// Eigenvalues of a 2x2 Hermitian matrix, ascending.
std::array<double, 2> hermitian_eigenvalues(const HermitianForm2& h);

struct TwoSmallest {
  double value = 0.0;
  std::array<Vec3, 2> witnesses{};  // orthonormal eigenvectors of m1, m2
};

TwoSmallest two_smallest_sum(const Mat3& m);

/// Nearest matrix with m1 + m2 = 0: M - ((m1 + m2) / 2)(phi1 phi1^T + phi2 phi2^T).
/// Only meaningful while the shifted pair stays below m3, i.e. near the
/// boundary or for m1 + m2 >= 0.
Mat3 project_to_two_sum_boundary(const Mat3& m);

/// R^2/2 - |s|^2.
double det_indicator(const CurvatureParts& parts);

/// Reaction of the det indicator with the zeroth-order term
/// (R - 2 mu)(R^2/2 - |S|^2) removed; equals R|S|^2 - 2 <S, Op(S) S>.
double det_indicator_remainder(const CurvatureParts& parts, double mu);

/// det_indicator_remainder minus 2 sum_alpha (R/2 - m_alpha) s~_alpha^2,
/// with s~ the components of s in the eigenbasis of M. Vanishes
/// identically.
double boundary_identity_gap(const CurvatureParts& parts, double mu);

/// Lower bound for d(m1 + m2)/dt under the reaction ODE:
///   -mu(m1+m2) + m1^2 + m2^2 + 2 m3 (m1+m2) + T(phi1,phi1) + T(phi2,phi2)
/// with T = s s^T / 2 and phi1, phi2 the two lowest eigenvectors.
double eigen_sum_rhs(const Mat3& m, const Vec3& s, double mu);

/// Coefficient of m3 (m1 + m2) in eigen_sum_rhs. The printed diagonal
/// formula of the sharp operator carries -2; direct contraction of the
/// bracket terms gives +2, which is what Kähler-Einstein stationarity
/// requires.
inline constexpr double kSharpBoundaryCoefficient = 2.0;

ConeReport cone_report(const CurvatureParts& parts, double mu = 0.0, double tol = kPredicateTol);

}  // namespace kflow
