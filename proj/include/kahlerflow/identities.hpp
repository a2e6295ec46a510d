// Randomized identity suites over the reaction and cone algebra.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kflow {

struct SuiteResult {
  std::string suite;
  long samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityOptions {
  std::uint64_t seed = 1;
  long samples = 1000;              // tensor-based suites
  long ricci_samples = 10000;       // ricci_claim, eigen_sum_boundary
  long equivariance_samples = 100;  // sharp_equivariance
  double mu_min = -2.0;
  double mu_max = 2.0;
  double scale = 1.0;
};

/// Tolerance per suite; missing names fall back to the built-in value.
struct SuiteTolerances {
  double cancellation = 1e-12;
  double trace_compatibility = 1e-12;
  double scalar_compatibility = 1e-12;
  double system_s_equivalence = 1e-11;
  double kahler_einstein_stationarity = 1e-13;
  double sharp_oracle = 1e-12;
  double sharp_equivariance = 1e-10;
  double structure_constants = 1e-14;
  double round_trip = 1e-12;
  double trace_identity = 1e-12;
  double ricci_claim = 1e-10;  // predicate tol; the suite counts disagreements
  double boundary_identity = 1e-12;
  double eigen_sum_boundary = 1e-12;
};

/// Runs every suite in a fixed order. ricci_claim reports the number of
/// disagreements as max_violation and passes only at zero.
std::vector<SuiteResult> run_identity_suites(const IdentityOptions& options, const SuiteTolerances& tol);

}  // namespace kflow
