// Trace decomposition of Kähler curvature into (R, S_ab, Op(S)).
//
// Real (1,1)-forms are represented by Hermitian coefficient matrices. The
// traceless basis is the Pauli triple
//
//   eta1 = sigma3 = diag(1, -1)
//   eta2 = sigma1 = [[0, 1], [1, 0]]
//   eta3 = sigma2 = [[0, -i], [i, 0]]
//
// and the orthonormal basis for <phi, psi> = sum phi_ab conj(psi_ab) is
// phi^alpha = eta_alpha / sqrt(2). Components are taken against the dual
// basis, so that
//
//   S_ab   = sum_alpha s_alpha phi^alpha_ab
//   S_abcd = sum_{alpha,beta} M_{alpha beta} phi^alpha_ab phi^beta_cd
//
// with s_alpha = <S, phi^alpha> and M_{alpha beta} = S_abcd conj(phi^alpha_ab)
// conj(phi^beta_cd). Under these conventions |S|^2 = |s|^2 and
// trace(M) = R / 2.

#pragma once

#include <array>
#include <stdexcept>

#include "kahlerflow/linalg3.hpp"
#include "kahlerflow/tensors.hpp"

namespace kflow {

struct FormBasis {
  HermitianForm2 omega;
  std::array<HermitianForm2, 3> eta;

  static const FormBasis& standard();
  /// phi^alpha = eta_alpha / sqrt(2).
  HermitianForm2 orthonormal(int alpha) const;
};

/// <phi, psi> = sum_ab phi_ab conj(psi_ab).
cplx form_inner(const HermitianForm2& phi, const HermitianForm2& psi);

struct CurvatureParts {
  double R = 0.0;
  Vec3 s{};
  Mat3 M{};
};

/// Traceless tensors in tensor form, before projecting onto the basis.
struct TracelessTensors {
  double R = 0.0;
  HermitianForm2 S2;    // S_ab
  KahlerCurvature S4;   // S_abcd
};

class InvalidCurvature : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDecomposeSymmetryTol = 1e-10;

TracelessTensors traceless_parts(const KahlerCurvature& t);

/// Throws InvalidCurvature when t fails symmetry validation at 1e-10.
CurvatureParts decompose(const KahlerCurvature& t);
/// decompose without the validation gate; for reaction tensors, which
/// carry the symmetries only up to the identities being tested.
CurvatureParts project_parts(const KahlerCurvature& t);

KahlerCurvature reconstruct(const CurvatureParts& parts);

/// 4x4 Op(R) = [[R/2, s], [s^T, M]] in the basis (omega/sqrt2, phi^1..3).
std::array<double, 16> op_r_matrix(const CurvatureParts& parts);

/// [phi, psi] = phi psi - psi phi. For Hermitian arguments the result is
/// anti-Hermitian: the Hermitian representation carries the factor
/// sqrt(-1) that the form representation absorbs.
Mat2c bracket(const HermitianForm2& phi, const HermitianForm2& psi);

/// c^{alpha beta gamma} = -i <[phi^alpha, phi^beta], phi^gamma>,
/// equal to sqrt(2) eps^{alpha beta gamma}.
std::array<std::array<std::array<double, 3>, 3>, 3> structure_constants();

/// Quadratic map capturing the bracket terms
///   S_{a p r d} S_{p b c r} - S_{a p c r} S_{p b r d}
/// of the traceless curvature reaction; in the orthonormal basis it is
/// 2 cof(M), i.e. diag(m) -> 2 diag(m2 m3, m1 m3, m1 m2).
Mat3 sharp(const Mat3& m);

/// The bracket-term combination above evaluated by direct tensor
/// contraction on any rank-4 array.
KahlerCurvature bracket_terms(const KahlerCurvature& s4);

struct AbComponents {
  double A = 0.0;
  Vec3 B{};
};

/// h = A I + B1 eta1 + B2 eta2 + B3 eta3.
AbComponents ab_components(const HermitianForm2& h);

}  // namespace kflow
