#include "kahlerflow/reactions.hpp"

#include <cmath>

namespace kflow {

KahlerCurvature reaction_riemann_coord(const ReactionInput& in) {
  const auto& R = in.T;
  const HermitianForm2 ric = ricci_trace(R);
  KahlerCurvature out;
  for (int q = 0; q < 2; ++q)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
          cplx ricci_part = 0.0;
          cplx quad = 0.0;
          for (int r = 0; r < 2; ++r) {
            ricci_part += ric(r, m) * R(q, j, l, r) + ric(r, j) * R(q, m, l, r) +
                          ric(l, r) * R(q, j, r, m) + ric(q, r) * R(l, j, r, m);
            for (int p = 0; p < 2; ++p)
              quad += R(p, r, q, j) * R(r, p, l, m) + R(p, r, l, j) * R(r, p, q, m) -
                      R(q, p, l, r) * R(p, j, r, m);
          }
          out(q, j, l, m) = in.mu * R(q, j, l, m) - 0.5 * ricci_part + quad;
        }
  return out;
}

KahlerCurvature reaction_riemann_frame(const ReactionInput& in) {
  const auto& R = in.T;
  KahlerCurvature out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx quad = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int r = 0; r < 2; ++r)
              quad += R(p, r, a, b) * R(r, p, c, d) + R(a, p, r, d) * R(p, b, c, r) -
                      R(a, p, c, r) * R(p, b, r, d);
          out(a, b, c, d) = -in.mu * R(a, b, c, d) + quad;
        }
  return out;
}

KahlerCurvature frame_rotation_terms(const ReactionInput& in) {
  const auto& R = in.T;
  const HermitianForm2 ric = ricci_trace(R);
  KahlerCurvature out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          cplx acc = 0.0;
          for (int q = 0; q < 2; ++q)
            acc += ric(a, q) * R(q, b, c, d) + ric(q, b) * R(a, q, c, d) + ric(c, q) * R(a, b, q, d) +
                   ric(q, d) * R(a, b, c, q);
          out(a, b, c, d) = 0.5 * acc - 2.0 * in.mu * R(a, b, c, d);
        }
  return out;
}

HermitianForm2 reaction_ricci_frame(const ReactionInput& in) {
  const HermitianForm2 ric = ricci_trace(in.T);
  HermitianForm2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      cplx acc = 0.0;
      for (int p = 0; p < 2; ++p)
        for (int r = 0; r < 2; ++r) acc += in.T(a, b, p, r) * ric(r, p);
      out(a, b) = -in.mu * ric(a, b) + acc;
    }
  return out;
}

PartsRate reaction_system_s(const CurvatureParts& parts, double mu) {
  const double shift = parts.R - 2.0 * mu;  // R - n mu
  const Mat3 M = symmetrized(parts.M);
  PartsRate rate;
  rate.dR = dot(parts.s, parts.s) + 0.5 * parts.R * shift;
  rate.ds = 0.5 * shift * parts.s + M * parts.s;
  rate.dM = -mu * M + M * M + sharp(M) + 0.5 * Mat3::outer(parts.s, parts.s);
  return rate;
}

Mat2c frame_flow_rhs(const Frame& e, const HermitianForm2& g, const HermitianForm2& ric, double mu) {
  const double scale = max_abs(g);
  if (std::abs(g.det()) <= 1e-14 * scale * scale) throw SingularMetric("frame_flow_rhs: singular metric");
  const Mat2c gdot = mu * g - ric;
  return cplx(-0.5) * (g.inverse() * gdot * e.e);
}

}  // namespace kflow
