// Reaction (zeroth-order) terms of the Kähler-Ricci curvature flows,
// evaluated at a point in a unitary frame, plus the frame evolution rule.

#pragma once

#include <stdexcept>

#include "kahlerflow/decomp.hpp"
#include "kahlerflow/tensors.hpp"

namespace kflow {

struct ReactionInput {
  KahlerCurvature T;
  double mu = 0.0;  // n mu is the average scalar curvature
};

/// Coordinate-form reaction of R_{\bar q j \bar l m} with the real
/// Laplacian dropped:
///   mu R - 1/2 (Ric_rm R_qjlr + Ric_rj R_qmlr + Ric_lr R_qjrm + Ric_qr R_ljrm)
///   + R_prqj R_rplm + R_prlj R_rpqm - R_qplr R_pjrm
KahlerCurvature reaction_riemann_coord(const ReactionInput& in);

/// Frame-form reaction:
///   -mu R_abcd + R_prab R_rpcd + R_aprd R_pbcr - R_apcr R_pbrd
KahlerCurvature reaction_riemann_frame(const ReactionInput& in);

/// Contribution of the moving frame, summed over the four slots; the slot
/// for index a contributes 1/2 Ric_aq R_qbcd - 1/2 mu R_abcd.
KahlerCurvature frame_rotation_terms(const ReactionInput& in);

/// -mu Ric_ab + sum_pr R_abpr Ric_rp.
HermitianForm2 reaction_ricci_frame(const ReactionInput& in);

/// Time derivative of (R, s, M).
struct PartsRate {
  double dR = 0.0;
  Vec3 ds{};
  Mat3 dM{};
};

/// The traceless system with n = 2:
///   dR = |s|^2 + R(R - 2 mu)/2
///   ds = (R - 2 mu)/2 s + M s
///   dM = -mu M + M^2 + sharp(M) + s s^T / 2
PartsRate reaction_system_s(const CurvatureParts& parts, double mu);

class SingularMetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// de^j_a/dt = -1/2 g^{j r} (-Ric_rs + mu g_rs) e^s_a.
/// Throws SingularMetric when |det g| <= 1e-14 * |g|^2.
Mat2c frame_flow_rhs(const Frame& e, const HermitianForm2& g, const HermitianForm2& ric, double mu);

}  // namespace kflow
