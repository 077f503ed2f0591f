#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "urtest/acov.hpp"
#include "urtest/result.hpp"
#include "urtest/series.hpp"

namespace urtest {

// Everything the bootstrap loop needs, computed once from the data:
// the AR(1) fit, the centered residuals, the eigen-floored covariance matrix
// of the residuals, and the whitened/standardized innovations resampled from.
struct LpbState {
  Ar1Fit fit;
  std::vector<double> centered_resid;
  SigmaHat sigma;
  StandardizedVector innovations;
  std::size_t n = 0;  // residual count == sigma dimension
};

LpbState lpb_prepare(const Series& y, const BandwidthRule& rule,
                     const KernelSpec& kernel = KernelSpec::trapezoid());

// Variant with the covariance matrix supplied by the caller. Used by tests
// that bypass estimation, and by lpb_prepare itself.
LpbState lpb_prepare_with_sigma(const Series& y, SigmaHat sigma);

struct ReplicatePair {
  double phi_star = 0.0;
  double t_star = 0.0;
};

// One bootstrap replicate from explicit resampling indices into the
// standardized innovations (deterministic core of lpb_replicate).
ReplicatePair lpb_replicate_from_indices(const LpbState& state,
                                         std::span<const std::size_t> indices);

ReplicatePair lpb_replicate(const LpbState& state, std::mt19937_64& rng);

// B^{-1} #{ i : observed > reps[i] }, strict inequality, ties count against
// rejection.
double bootstrap_pvalue(double observed, std::span<const double> reps);

// The full test: prepare, run B replicates on substreams of `seed`, form
// p-values for both the coefficient and the t-statistic, decide at `size`.
TestResult lpb_test(const Series& y, std::size_t B, double size,
                    const BandwidthRule& rule, std::uint64_t seed,
                    const KernelSpec& kernel = KernelSpec::trapezoid());

}  // namespace urtest
