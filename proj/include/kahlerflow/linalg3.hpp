// Fixed-size real 3-vectors and 3x3 matrices for the traceless (1,1)-form
// components s and Op(S).

#pragma once

#include <array>

namespace kflow {

class SplitMix64;

using Vec3 = std::array<double, 3>;

struct Mat3 {
  std::array<double, 9> v{};

  constexpr double& operator()(int i, int j) { return v[3 * i + j]; }
  constexpr double operator()(int i, int j) const { return v[3 * i + j]; }

  static Mat3 identity() { return diag({1.0, 1.0, 1.0}); }
  static Mat3 diag(const Vec3& d);
  static Mat3 outer(const Vec3& a, const Vec3& b);
  /// Columns c0, c1, c2.
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2);

  Mat3 transpose() const;
  double trace() const { return v[0] + v[4] + v[8]; }
  double det() const;
  /// Cofactor matrix; equals adj(M)^T, and adj(M) for symmetric M.
  Mat3 cofactor() const;
  Vec3 column(int j) const { return {v[j], v[3 + j], v[6 + j]}; }

  Mat3& operator+=(const Mat3& o);
  Mat3& operator-=(const Mat3& o);
  Mat3& operator*=(double s);
};

Mat3 operator+(Mat3 a, const Mat3& b);
Mat3 operator-(Mat3 a, const Mat3& b);
Mat3 operator*(double s, Mat3 a);
Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& x);

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);

double max_abs(const Mat3& m);
double max_abs(const Vec3& x);
/// max |M - M^T|.
double asymmetry(const Mat3& m);
Mat3 symmetrized(const Mat3& m);
/// x^T M x.
double quadratic_form(const Mat3& m, const Vec3& x);

/// Spectral decomposition of a symmetric matrix, ascending eigenvalues.
/// vectors[k] is the unit eigenvector for values[k], sign-normalized so
/// its first component of largest modulus is positive.
struct SymEigen {
  Vec3 values{};
  std::array<Vec3, 3> vectors{};
};

/// Closed-form trigonometric solve; falls back to cyclic Jacobi when the
/// spectrum is near-degenerate (see kDegenerateDiscriminant).
SymEigen eigen_sym3(const Mat3& m);
/// Cyclic Jacobi sweeps only. Used as the fallback and as a test oracle.
SymEigen eigen_sym3_jacobi(const Mat3& m);

/// Threshold on 1 - r^2 of the normalized characteristic cubic below which
/// the trigonometric branch loses accuracy and Jacobi takes over.
inline constexpr double kDegenerateDiscriminant = 1e-6;

/// Uniformly distributed rotation (via a normalized Gaussian quaternion).
Mat3 random_rotation(SplitMix64& rng);

}  // namespace kflow
