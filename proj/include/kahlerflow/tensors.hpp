// Pointwise Kähler curvature data in complex dimension 2.
//
// Every frame-index tensor is stored with the barred index first in each
// pair: KahlerCurvature(a, b, c, d) holds R_{\bar a b \bar c d}. All algebra
// in this header happens in a unitary frame, so raised and lowered indices
// coincide.

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace kflow {

using cplx = std::complex<double>;

/// 2x2 complex matrix. Houses Hermitian forms (metric, Ricci, traceless
/// Ricci, real (1,1)-forms), frames and anti-Hermitian brackets.
struct Mat2c {
  std::array<cplx, 4> v{};

  constexpr cplx& operator()(int a, int b) { return v[2 * a + b]; }
  constexpr const cplx& operator()(int a, int b) const { return v[2 * a + b]; }

  static Mat2c identity() { return diag(1.0, 1.0); }
  static Mat2c diag(cplx d0, cplx d1) {
    Mat2c m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    return m;
  }
  static Mat2c from_rows(cplx a00, cplx a01, cplx a10, cplx a11) {
    Mat2c m;
    m.v = {a00, a01, a10, a11};
    return m;
  }

  cplx trace() const { return v[0] + v[3]; }
  cplx det() const { return v[0] * v[3] - v[1] * v[2]; }
  Mat2c adjoint() const;  // conjugate transpose
  Mat2c transpose() const;
  Mat2c inverse() const;

  Mat2c& operator+=(const Mat2c& o);
  Mat2c& operator-=(const Mat2c& o);
  Mat2c& operator*=(cplx s);
};

Mat2c operator+(Mat2c a, const Mat2c& b);
Mat2c operator-(Mat2c a, const Mat2c& b);
Mat2c operator*(const Mat2c& a, const Mat2c& b);
Mat2c operator*(cplx s, Mat2c a);
Mat2c operator*(Mat2c a, cplx s);

/// Largest entry modulus.
double max_abs(const Mat2c& m);
/// max |m - m^H|.
double hermitian_defect(const Mat2c& m);

using HermitianForm2 = Mat2c;

/// Frame e^j_a: column a holds the components of e_a in the coordinate
/// basis. Kept distinct from forms so the two cannot be swapped silently.
struct Frame {
  Mat2c e = Mat2c::identity();
  cplx operator()(int j, int a) const { return e(j, a); }
};

/// max |e^H g e - I|.
double orthonormality_defect(const Frame& frame, const HermitianForm2& g);

/// Rank-4 complex array with entries T_{\bar a b \bar c d}, a..d in {0,1}.
class KahlerCurvature {
 public:
  constexpr cplx& operator()(int a, int b, int c, int d) {
    return v_[8 * a + 4 * b + 2 * c + d];
  }
  constexpr const cplx& operator()(int a, int b, int c, int d) const {
    return v_[8 * a + 4 * b + 2 * c + d];
  }

  std::array<cplx, 16>& data() { return v_; }
  const std::array<cplx, 16>& data() const { return v_; }

  KahlerCurvature& operator+=(const KahlerCurvature& o);
  KahlerCurvature& operator-=(const KahlerCurvature& o);
  KahlerCurvature& operator*=(double s);

  friend KahlerCurvature operator+(KahlerCurvature a, const KahlerCurvature& b) { return a += b; }
  friend KahlerCurvature operator-(KahlerCurvature a, const KahlerCurvature& b) { return a -= b; }
  friend KahlerCurvature operator*(double s, KahlerCurvature a) { return a *= s; }

 private:
  std::array<cplx, 16> v_{};
};

double max_abs(const KahlerCurvature& t);

/// Maximum violation of each curvature symmetry, measured per entry as the
/// distance to the average of the related pair, |x - y| / 2.
struct SymmetryReport {
  double pair = 0.0;     // T_{abcd} - T_{cdab}
  double kahler = 0.0;   // T_{abcd} - T_{adcb}, T_{abcd} - T_{cbad}
  double reality = 0.0;  // conj(T_{abcd}) - T_{badc}
  bool valid = true;
};

SymmetryReport validate_curvature_symmetries(const KahlerCurvature& t, double tol);

/// Average over the order-8 group generated by the pair swap, the two
/// Kähler swaps and conjugate reversal. Idempotent.
KahlerCurvature symmetrize(const KahlerCurvature& t);

/// Symmetrized uniform draws in [-scale, scale] for every real and
/// imaginary part. Deterministic in seed.
KahlerCurvature random_kahler_curvature(std::uint64_t seed, double scale);

/// c (δ_ab δ_cd + δ_ad δ_cb): curvature shape of projective space.
KahlerCurvature constant_hsc_curvature(double c = 1.0);
/// T_{1111} = T_{2222} = k, all independent mixed entries zero.
KahlerCurvature product_space_curvature(double k = 2.0);

/// Ric_{\bar a b} = sum_p T_{\bar a b \bar p p}.
HermitianForm2 ricci_trace(const KahlerCurvature& t);
/// Real part of sum_a h_{\bar a a}.
double scalar_trace(const HermitianForm2& h);

}  // namespace kflow
