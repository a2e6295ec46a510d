#include "kahlerflow/decomp.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kflow {

namespace {
constexpr cplx I{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}  // namespace

const FormBasis& FormBasis::standard() {
  static const FormBasis basis{
      Mat2c::identity(),
      {Mat2c::diag(1.0, -1.0), Mat2c::from_rows(0.0, 1.0, 1.0, 0.0), Mat2c::from_rows(0.0, -I, I, 0.0)}};
  return basis;
}

HermitianForm2 FormBasis::orthonormal(int alpha) const { return kInvSqrt2 * eta[alpha]; }

cplx form_inner(const HermitianForm2& phi, const HermitianForm2& psi) {
  cplx acc = 0.0;
  for (int i = 0; i < 4; ++i) acc += phi.v[i] * std::conj(psi.v[i]);
  return acc;
}

TracelessTensors traceless_parts(const KahlerCurvature& t) {
  TracelessTensors out;
  const HermitianForm2 ric = ricci_trace(t);
  out.R = scalar_trace(ric);
  out.S2 = ric - (out.R / 2.0) * Mat2c::identity();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const double dab = a == b ? 1.0 : 0.0;
          const double dcd = c == d ? 1.0 : 0.0;
          out.S4(a, b, c, d) =
              t(a, b, c, d) - 0.5 * (ric(a, b) * dcd + ric(c, d) * dab) + 0.25 * out.R * dab * dcd;
        }
  return out;
}

CurvatureParts project_parts(const KahlerCurvature& t) {
  const auto& basis = FormBasis::standard();
  const TracelessTensors tl = traceless_parts(t);
  std::array<HermitianForm2, 3> phi;
  for (int k = 0; k < 3; ++k) phi[k] = basis.orthonormal(k);

  CurvatureParts parts;
  parts.R = tl.R;
  for (int al = 0; al < 3; ++al) parts.s[al] = form_inner(tl.S2, phi[al]).real();
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      cplx acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              acc += tl.S4(a, b, c, d) * std::conj(phi[al](a, b)) * std::conj(phi[be](c, d));
      parts.M(al, be) = acc.real();
    }
  return parts;
}

CurvatureParts decompose(const KahlerCurvature& t) {
  const SymmetryReport rep = validate_curvature_symmetries(t, kDecomposeSymmetryTol);
  if (!rep.valid) {
    throw InvalidCurvature("curvature tensor fails symmetry validation (pair " + std::to_string(rep.pair) +
                           ", kahler " + std::to_string(rep.kahler) + ", reality " +
                           std::to_string(rep.reality) + ")");
  }
  return project_parts(t);
}

KahlerCurvature reconstruct(const CurvatureParts& parts) {
  const auto& basis = FormBasis::standard();
  std::array<HermitianForm2, 3> phi;
  for (int k = 0; k < 3; ++k) phi[k] = basis.orthonormal(k);

  HermitianForm2 s2;
  for (int al = 0; al < 3; ++al) s2 += parts.s[al] * phi[al];
  const HermitianForm2 ric = s2 + (parts.R / 2.0) * Mat2c::identity();

  KahlerCurvature t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx s4 = 0.0;
          for (int al = 0; al < 3; ++al)
            for (int be = 0; be < 3; ++be) s4 += parts.M(al, be) * phi[al](a, b) * phi[be](c, d);
          const double dab = a == b ? 1.0 : 0.0;
          const double dcd = c == d ? 1.0 : 0.0;
          t(a, b, c, d) = s4 + 0.5 * (ric(a, b) * dcd + ric(c, d) * dab) - 0.25 * parts.R * dab * dcd;
        }
  return t;
}

std::array<double, 16> op_r_matrix(const CurvatureParts& parts) {
  std::array<double, 16> op{};
  op[0] = parts.R / 2.0;
  for (int k = 0; k < 3; ++k) {
    op[1 + k] = parts.s[k];
    op[4 * (1 + k)] = parts.s[k];
    for (int j = 0; j < 3; ++j) op[4 * (1 + k) + 1 + j] = parts.M(k, j);
  }
  return op;
}

Mat2c bracket(const HermitianForm2& phi, const HermitianForm2& psi) { return phi * psi - psi * phi; }

std::array<std::array<std::array<double, 3>, 3>, 3> structure_constants() {
  const auto& basis = FormBasis::standard();
  std::array<std::array<std::array<double, 3>, 3>, 3> c{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Mat2c br = bracket(basis.orthonormal(a), basis.orthonormal(b));
      for (int g = 0; g < 3; ++g) c[a][b][g] = (-I * form_inner(br, basis.orthonormal(g))).real();
    }
  return c;
}

Mat3 sharp(const Mat3& m) { return 2.0 * symmetrized(m).cofactor(); }

KahlerCurvature bracket_terms(const KahlerCurvature& s4) {
  KahlerCurvature out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx acc = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int r = 0; r < 2; ++r)
              acc += s4(a, p, r, d) * s4(p, b, c, r) - s4(a, p, c, r) * s4(p, b, r, d);
          out(a, b, c, d) = acc;
        }
  return out;
}

AbComponents ab_components(const HermitianForm2& h) {
  const auto& basis = FormBasis::standard();
  AbComponents out;
  // Pauli matrices are orthogonal with norm^2 = 2 under form_inner.
  out.A = 0.5 * form_inner(h, basis.omega).real();
  for (int k = 0; k < 3; ++k) out.B[k] = 0.5 * form_inner(h, basis.eta[k]).real();
  return out;
}

}  // namespace kflow
