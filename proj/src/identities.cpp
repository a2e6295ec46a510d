#include "kahlerflow/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kahlerflow/cone.hpp"
#include "kahlerflow/decomp.hpp"
#include "kahlerflow/random.hpp"
#include "kahlerflow/reactions.hpp"

namespace kflow {

namespace {

struct Sample {
  KahlerCurvature T;
  double mu;
};

Sample draw(std::uint64_t base, long i, const IdentityOptions& o) {
  SplitMix64 rng(derive_seed(base, static_cast<std::uint64_t>(i)));
  const std::uint64_t tensor_seed = rng.next();
  const double mu = rng.uniform(o.mu_min, o.mu_max);
  return {random_kahler_curvature(tensor_seed, o.scale), mu};
}

double parts_distance(const CurvatureParts& a, const PartsRate& b) {
  return std::max({std::abs(a.R - b.dR), max_abs(a.s - b.ds), max_abs(a.M - b.dM)});
}

SuiteResult finish(std::string name, long samples, double worst, double tol) {
  return {std::move(name), samples, worst, tol, worst <= tol};
}

}  // namespace

std::vector<SuiteResult> run_identity_suites(const IdentityOptions& o, const SuiteTolerances& tol) {
  std::vector<SuiteResult> out;
  std::uint64_t suite_index = 0;
  auto next_base = [&]() { return derive_seed(o.seed, suite_index++); };

  // Reaction identities share one ensemble.
  {
    const std::uint64_t base = next_base();
    double cancel = 0.0, trace = 0.0, scalar = 0.0, system = 0.0;
    for (long i = 0; i < o.samples; ++i) {
      const Sample smp = draw(base, i, o);
      const ReactionInput in{smp.T, smp.mu};
      const KahlerCurvature frame = reaction_riemann_frame(in);
      KahlerCurvature sum = reaction_riemann_coord(in);
      sum += frame_rotation_terms(in);
      KahlerCurvature diff = frame;
      diff -= sum;
      cancel = std::max(cancel, max_abs(diff));

      const HermitianForm2 ric_rate = reaction_ricci_frame(in);
      trace = std::max(trace, max_abs(ricci_trace(frame) - ric_rate));

      const PartsRate rate = reaction_system_s(decompose(smp.T), smp.mu);
      scalar = std::max(scalar, std::abs(scalar_trace(ric_rate) - rate.dR));
      system = std::max(system, parts_distance(project_parts(frame), rate));
    }
    out.push_back(finish("cancellation", o.samples, cancel, tol.cancellation));
    out.push_back(finish("trace_compatibility", o.samples, trace, tol.trace_compatibility));
    out.push_back(finish("scalar_compatibility", o.samples, scalar, tol.scalar_compatibility));
    out.push_back(finish("system_s_equivalence", o.samples, system, tol.system_s_equivalence));
  }

  {
    const PartsRate r = reaction_system_s({6.0, {0.0, 0.0, 0.0}, Mat3::identity()}, 3.0);
    const double worst = std::max({std::abs(r.dR), max_abs(r.ds), max_abs(r.dM)});
    out.push_back(finish("kahler_einstein_stationarity", 1, worst, tol.kahler_einstein_stationarity));
  }

  {
    const std::uint64_t base = next_base();
    double sharp_worst = 0.0, round = 0.0, trace_id = 0.0;
    for (long i = 0; i < o.samples; ++i) {
      const Sample smp = draw(base, i, o);
      const CurvatureParts p = decompose(smp.T);
      const TracelessTensors tt = traceless_parts(smp.T);
      const Mat3 oracle = project_parts(bracket_terms(tt.S4)).M;
      sharp_worst = std::max(sharp_worst, max_abs(oracle - sharp(p.M)));

      KahlerCurvature diff = reconstruct(p);
      diff -= smp.T;
      round = std::max(round, max_abs(diff));
      trace_id = std::max(trace_id, std::abs(p.M.trace() - 0.5 * p.R));
    }
    out.push_back(finish("sharp_oracle", o.samples, sharp_worst, tol.sharp_oracle));
    out.push_back(finish("round_trip", o.samples, round, tol.round_trip));
    out.push_back(finish("trace_identity", o.samples, trace_id, tol.trace_identity));
  }

  {
    SplitMix64 rng(next_base());
    double worst = 0.0;
    for (long i = 0; i < o.equivariance_samples; ++i) {
      Mat3 m;
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) m(a, b) = m(b, a) = rng.uniform(-o.scale, o.scale);
      const Mat3 q = random_rotation(rng);
      const Mat3 lhs = sharp(q * m * q.transpose());
      const Mat3 rhs = q * sharp(m) * q.transpose();
      worst = std::max(worst, max_abs(lhs - rhs));
    }
    out.push_back(finish("sharp_equivariance", o.equivariance_samples, worst, tol.sharp_equivariance));
  }

  {
    const auto c = structure_constants();
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int g = 0; g < 3; ++g) {
          const double eps = (a == b || b == g || a == g) ? 0.0 : (((b - a + 3) % 3 == 1) ? 1.0 : -1.0);
          worst = std::max(worst, std::abs(c[a][b][g] - std::numbers::sqrt2 * eps));
        }
    out.push_back(finish("structure_constants", 27, worst, tol.structure_constants));
  }

  {
    SplitMix64 rng(next_base());
    long disagreements = 0;
    for (long i = 0; i < o.ricci_samples; ++i) {
      const double A = rng.uniform(-1.0, 1.0);
      const Vec3 B{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const bool claim = is_ricci_nonneg(A, B, tol.ricci_claim);
      const bool spectral = hermitian_eigenvalues(ricci_matrix_p(A, B))[0] >= -tol.ricci_claim;
      if (claim != spectral) ++disagreements;
    }
    SuiteResult r{"ricci_claim", o.ricci_samples, static_cast<double>(disagreements), tol.ricci_claim,
                  disagreements == 0};
    out.push_back(r);
  }

  {
    const std::uint64_t base = next_base();
    double worst = 0.0;
    for (long i = 0; i < o.samples; ++i) {
      const Sample smp = draw(base, i, o);
      worst = std::max(worst, std::abs(boundary_identity_gap(decompose(smp.T), smp.mu)));
    }
    out.push_back(finish("boundary_identity", o.samples, worst, tol.boundary_identity));
  }

  {
    // Boundary samples m1 + m2 = 0 with m3 >= m2, random orientation and s.
    SplitMix64 rng(next_base());
    double worst = 0.0;
    for (long i = 0; i < o.ricci_samples; ++i) {
      const double u = rng.uniform(0.0, 2.0);
      const double m3 = u + rng.uniform(0.0, 2.0);
      const Mat3 q = random_rotation(rng);
      const Mat3 m = symmetrized(q * Mat3::diag({-u, u, m3}) * q.transpose());
      const Vec3 s{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      const double mu = rng.uniform(o.mu_min, o.mu_max);
      worst = std::max(worst, -eigen_sum_rhs(m, s, mu));
    }
    out.push_back(finish("eigen_sum_boundary", o.ricci_samples, std::max(0.0, worst), tol.eigen_sum_boundary));
  }

  return out;
}

}  // namespace kflow
