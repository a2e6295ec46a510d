#include "kahlerflow/tensors.hpp"

#include <algorithm>
#include <cmath>

#include "kahlerflow/random.hpp"

namespace kflow {

Mat2c Mat2c::adjoint() const {
  return from_rows(std::conj(v[0]), std::conj(v[2]), std::conj(v[1]), std::conj(v[3]));
}

Mat2c Mat2c::transpose() const { return from_rows(v[0], v[2], v[1], v[3]); }

Mat2c Mat2c::inverse() const {
  const cplx d = det();
  return from_rows(v[3] / d, -v[1] / d, -v[2] / d, v[0] / d);
}

Mat2c& Mat2c::operator+=(const Mat2c& o) {
  for (int i = 0; i < 4; ++i) v[i] += o.v[i];
  return *this;
}

Mat2c& Mat2c::operator-=(const Mat2c& o) {
  for (int i = 0; i < 4; ++i) v[i] -= o.v[i];
  return *this;
}

Mat2c& Mat2c::operator*=(cplx s) {
  for (auto& x : v) x *= s;
  return *this;
}

Mat2c operator+(Mat2c a, const Mat2c& b) { return a += b; }
Mat2c operator-(Mat2c a, const Mat2c& b) { return a -= b; }
Mat2c operator*(cplx s, Mat2c a) { return a *= s; }
Mat2c operator*(Mat2c a, cplx s) { return a *= s; }

Mat2c operator*(const Mat2c& a, const Mat2c& b) {
  Mat2c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

double max_abs(const Mat2c& m) {
  double r = 0.0;
  for (const auto& x : m.v) r = std::max(r, std::abs(x));
  return r;
}

double hermitian_defect(const Mat2c& m) { return max_abs(m - m.adjoint()); }

double orthonormality_defect(const Frame& frame, const HermitianForm2& g) {
  return max_abs(frame.e.adjoint() * g * frame.e - Mat2c::identity());
}

KahlerCurvature& KahlerCurvature::operator+=(const KahlerCurvature& o) {
  for (int i = 0; i < 16; ++i) v_[i] += o.v_[i];
  return *this;
}

KahlerCurvature& KahlerCurvature::operator-=(const KahlerCurvature& o) {
  for (int i = 0; i < 16; ++i) v_[i] -= o.v_[i];
  return *this;
}

KahlerCurvature& KahlerCurvature::operator*=(double s) {
  for (auto& x : v_) x *= s;
  return *this;
}

double max_abs(const KahlerCurvature& t) {
  double r = 0.0;
  for (const auto& x : t.data()) r = std::max(r, std::abs(x));
  return r;
}

SymmetryReport validate_curvature_symmetries(const KahlerCurvature& t, double tol) {
  SymmetryReport rep;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const cplx x = t(a, b, c, d);
          rep.pair = std::max(rep.pair, 0.5 * std::abs(x - t(c, d, a, b)));
          rep.kahler =
              std::max({rep.kahler, 0.5 * std::abs(x - t(a, d, c, b)), 0.5 * std::abs(x - t(c, b, a, d))});
          rep.reality = std::max(rep.reality, 0.5 * std::abs(std::conj(x) - t(b, a, d, c)));
        }
  rep.valid = rep.pair <= tol && rep.kahler <= tol && rep.reality <= tol;
  return rep;
}

namespace {

struct GroupElement {
  std::array<int, 4> perm;
  bool conjugate;
};

// Closure of {pair swap, Kähler swaps, conjugate reversal}.
constexpr std::array<GroupElement, 8> kSymmetryGroup{{
    {{0, 1, 2, 3}, false},
    {{0, 3, 2, 1}, false},
    {{2, 1, 0, 3}, false},
    {{2, 3, 0, 1}, false},
    {{1, 0, 3, 2}, true},
    {{1, 2, 3, 0}, true},
    {{3, 0, 1, 2}, true},
    {{3, 2, 1, 0}, true},
}};

}  // namespace

KahlerCurvature symmetrize(const KahlerCurvature& t) {
  KahlerCurvature out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const std::array<int, 4> idx{a, b, c, d};
          cplx acc = 0.0;
          for (const auto& g : kSymmetryGroup) {
            const cplx x = t(idx[g.perm[0]], idx[g.perm[1]], idx[g.perm[2]], idx[g.perm[3]]);
            acc += g.conjugate ? std::conj(x) : x;
          }
          out(a, b, c, d) = acc / 8.0;
        }
  return out;
}

KahlerCurvature random_kahler_curvature(std::uint64_t seed, double scale) {
  SplitMix64 rng(seed);
  KahlerCurvature raw;
  for (auto& x : raw.data()) {
    const double re = rng.uniform(-scale, scale);
    const double im = rng.uniform(-scale, scale);
    x = {re, im};
  }
  return symmetrize(raw);
}

KahlerCurvature constant_hsc_curvature(double c) {
  KahlerCurvature t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int cc = 0; cc < 2; ++cc)
        for (int d = 0; d < 2; ++d)
          t(a, b, cc, d) = c * (double(a == b && cc == d) + double(a == d && cc == b));
  return t;
}

KahlerCurvature product_space_curvature(double k) {
  KahlerCurvature t;
  t(0, 0, 0, 0) = k;
  t(1, 1, 1, 1) = k;
  return t;
}

HermitianForm2 ricci_trace(const KahlerCurvature& t) {
  HermitianForm2 r;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) r(a, b) = t(a, b, 0, 0) + t(a, b, 1, 1);
  return r;
}

double scalar_trace(const HermitianForm2& h) { return h.trace().real(); }

}  // namespace kflow
