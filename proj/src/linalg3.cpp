#include "kahlerflow/linalg3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kahlerflow/random.hpp"

namespace kflow {

Mat3 Mat3::diag(const Vec3& d) {
  Mat3 m;
  m(0, 0) = d[0];
  m(1, 1) = d[1];
  m(2, 2) = d[2];
  return m;
}

Mat3 Mat3::outer(const Vec3& a, const Vec3& b) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

Mat3 Mat3::from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    m(i, 0) = c0[i];
    m(i, 1) = c1[i];
    m(i, 2) = c2[i];
  }
  return m;
}

Mat3 Mat3::transpose() const {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
  return t;
}

double Mat3::det() const {
  const auto& m = *this;
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat3 Mat3::cofactor() const {
  const auto& m = *this;
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // Cyclic index choice absorbs the (-1)^{i+j} sign.
      c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
    }
  return c;
}

Mat3& Mat3::operator+=(const Mat3& o) {
  for (int i = 0; i < 9; ++i) v[i] += o.v[i];
  return *this;
}

Mat3& Mat3::operator-=(const Mat3& o) {
  for (int i = 0; i < 9; ++i) v[i] -= o.v[i];
  return *this;
}

Mat3& Mat3::operator*=(double s) {
  for (auto& x : v) x *= s;
  return *this;
}

Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
Mat3 operator*(double s, Mat3 a) { return a *= s; }

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

Vec3 operator*(const Mat3& a, const Vec3& x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1] + a(0, 2) * x[2],
          a(1, 0) * x[0] + a(1, 1) * x[1] + a(1, 2) * x[2],
          a(2, 0) * x[0] + a(2, 1) * x[1] + a(2, 2) * x[2]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

double max_abs(const Mat3& m) {
  double r = 0.0;
  for (double x : m.v) r = std::max(r, std::abs(x));
  return r;
}

double max_abs(const Vec3& x) {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

double asymmetry(const Mat3& m) { return max_abs(m - m.transpose()); }

Mat3 symmetrized(const Mat3& m) { return 0.5 * (m + m.transpose()); }

double quadratic_form(const Mat3& m, const Vec3& x) { return dot(x, m * x); }

namespace {

Vec3 normalize_sign(Vec3 x) {
  const double n = norm(x);
  x = (1.0 / n) * x;
  int lead = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(x[i]) > std::abs(x[lead]) + 1e-14) lead = i;
  if (x[lead] < 0.0) x = -1.0 * x;
  return x;
}

// Ascending by value; exact ties broken by lexicographic eigenvector order.
SymEigen sorted(Vec3 values, std::array<Vec3, 3> vecs) {
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return vecs[a] < vecs[b];
  });
  SymEigen out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = values[order[k]];
    out.vectors[k] = vecs[order[k]];
  }
  return out;
}

// Unit null vector of the (nearly singular, rank-2) matrix a - lambda I.
Vec3 null_vector(const Mat3& a, double lambda) {
  const Vec3 r0{a(0, 0) - lambda, a(0, 1), a(0, 2)};
  const Vec3 r1{a(1, 0), a(1, 1) - lambda, a(1, 2)};
  const Vec3 r2{a(2, 0), a(2, 1), a(2, 2) - lambda};
  const std::array<Vec3, 3> candidates{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  const Vec3* best = &candidates[0];
  for (const auto& c : candidates)
    if (dot(c, c) > dot(*best, *best)) best = &c;
  return normalize_sign(*best);
}

}  // namespace

SymEigen eigen_sym3_jacobi(const Mat3& m) {
  Mat3 a = symmetrized(m);
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    if (off == 0.0) break;
    const double scale = a(0, 0) * a(0, 0) + a(1, 1) * a(1, 1) + a(2, 2) * a(2, 2) + 2.0 * off;
    if (off <= 1e-36 * scale) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  return sorted({a(0, 0), a(1, 1), a(2, 2)},
                {normalize_sign(v.column(0)), normalize_sign(v.column(1)), normalize_sign(v.column(2))});
}

SymEigen eigen_sym3(const Mat3& m) {
  const Mat3 a = symmetrized(m);
  const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  if (off == 0.0) {
    return sorted({a(0, 0), a(1, 1), a(2, 2)}, {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}});
  }
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  const Mat3 b = (1.0 / p) * (a - q * Mat3::identity());
  const double r = b.det() / 2.0;
  if (1.0 - r * r < kDegenerateDiscriminant) return eigen_sym3_jacobi(a);

  const double phi = std::acos(std::clamp(r, -1.0, 1.0)) / 3.0;
  const double top = q + 2.0 * p * std::cos(phi);
  const double bottom = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double middle = 3.0 * q - top - bottom;
  const Vec3 vb = null_vector(a, bottom);
  const Vec3 vt = null_vector(a, top);
  const Vec3 vm = normalize_sign(cross(vt, vb));
  return sorted({bottom, middle, top}, {vb, vm, vt});
}

Mat3 random_rotation(SplitMix64& rng) {
  double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  Mat3 q;
  q(0, 0) = 1 - 2 * (y * y + z * z);
  q(0, 1) = 2 * (x * y - z * w);
  q(0, 2) = 2 * (x * z + y * w);
  q(1, 0) = 2 * (x * y + z * w);
  q(1, 1) = 1 - 2 * (x * x + z * z);
  q(1, 2) = 2 * (y * z - x * w);
  q(2, 0) = 2 * (x * z - y * w);
  q(2, 1) = 2 * (y * z + x * w);
  q(2, 2) = 1 - 2 * (x * x + y * y);
  return q;
}

}  // namespace kflow
