#include "urtest/lpb.hpp"

#include <cmath>
#include <string>

#include "urtest/rng.hpp"

namespace urtest {

LpbState lpb_prepare_with_sigma(const Series& y, SigmaHat sigma) {
  LpbState state;
  state.fit = fit_ar1(y);
  state.n = state.fit.residuals.size();
  if (sigma.size() != state.n)
    fail(errc::invalid_argument, "lpb_prepare: sigma dimension mismatch");
  state.centered_resid = center(state.fit.residuals);
  state.sigma = std::move(sigma);
  const std::vector<double> eps_hat = whiten(state.sigma, state.centered_resid);
  // standardize() centers first, so this is whiten -> center -> standardize.
  state.innovations = standardize(eps_hat);
  return state;
}

LpbState lpb_prepare(const Series& y, const BandwidthRule& rule,
                     const KernelSpec& kernel) {
  if (y.size() < 9)
    fail(errc::insufficient_data,
         "lpb_prepare: need at least 9 observations (8 residuals)");
  Ar1Fit fit = fit_ar1(y);
  // Bandwidth and Sigma-hat come from the raw residuals; centering applies
  // only to the vector that gets whitened.
  const AutocovSeq acov =
      sample_autocov(fit.residuals, fit.residuals.size() - 1);
  const std::size_t l = select_bandwidth(acov, rule);
  return lpb_prepare_with_sigma(y, build_sigma_hat(acov, l, kernel));
}

ReplicatePair lpb_replicate_from_indices(const LpbState& state,
                                         std::span<const std::size_t> indices) {
  if (indices.size() != state.n)
    fail(errc::invalid_argument, "lpb_replicate: index count mismatch");
  std::vector<double> eps_star(state.n);
  for (std::size_t i = 0; i < state.n; ++i)
    eps_star[i] = state.innovations.values[indices[i]];
  const std::vector<double> v_star = color(state.sigma, eps_star);
  const Series y_star = integrate(v_star);
  const Ar1Fit fit = fit_ar1(y_star);
  return {fit.phi_hat, fit.t_stat};
}

ReplicatePair lpb_replicate(const LpbState& state, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, state.n - 1);
  std::vector<std::size_t> idx(state.n);
  for (auto& i : idx) i = pick(rng);
  return lpb_replicate_from_indices(state, idx);
}

double bootstrap_pvalue(double observed, std::span<const double> reps) {
  if (reps.empty()) fail(errc::empty_input, "bootstrap_pvalue: no replicates");
  std::size_t count = 0;
  for (double r : reps)
    if (observed > r) ++count;
  return static_cast<double>(count) / static_cast<double>(reps.size());
}

TestResult lpb_test(const Series& y, std::size_t B, double size,
                    const BandwidthRule& rule, std::uint64_t seed,
                    const KernelSpec& kernel) {
  if (B < 1) fail(errc::invalid_argument, "lpb_test: B must be >= 1");
  if (!(size > 0.0 && size < 1.0))
    fail(errc::invalid_argument, "lpb_test: size must be in (0,1)");

  const LpbState state = lpb_prepare(y, rule, kernel);

  BootstrapRun run;
  run.B = B;
  run.seed = seed;
  run.phi_observed = state.fit.phi_hat;
  run.t_observed = state.fit.t_stat;
  run.phi_reps.resize(B);
  run.t_reps.resize(B);
  for (std::size_t i = 0; i < B; ++i) {
    // Replicate i owns substream (seed, i); a degenerate draw moves to the
    // next attempt substream, and three failures abort the run.
    ReplicatePair rep;
    bool done = false;
    for (std::uint64_t attempt = 0; attempt < 3 && !done; ++attempt) {
      auto rng = make_rng(seed, {stream::replicate, i, attempt});
      try {
        rep = lpb_replicate(state, rng);
        done = true;
      } catch (const Error& e) {
        if (e.code() != errc::zero_residual_variance &&
            e.code() != errc::degenerate_regressor)
          throw;
      }
    }
    if (!done)
      fail(errc::replicate_failure,
           "lpb_test: replicate " + std::to_string(i) + " kept degenerating");
    run.phi_reps[i] = rep.phi_star;
    run.t_reps[i] = rep.t_star;
  }
  run.p_phi = bootstrap_pvalue(run.phi_observed, run.phi_reps);
  run.p_t = bootstrap_pvalue(run.t_observed, run.t_reps);

  TestResult result;
  result.method = Method::lpb_pp;
  result.statistic = run.t_observed;
  result.p_value = run.p_t;
  result.reject = run.p_t < size;
  result.nuisance["l"] = static_cast<double>(state.sigma.bandwidth);
  result.nuisance["sigma_star_sq"] = state.sigma.sigma_star_sq;
  result.nuisance["floored_count"] = static_cast<double>(state.sigma.floored_count);
  result.nuisance["B"] = static_cast<double>(B);
  result.nuisance["size"] = size;
  result.nuisance["p_phi"] = run.p_phi;
  result.nuisance["reject_phi"] = run.p_phi < size ? 1.0 : 0.0;
  result.bootstrap = std::move(run);
  return result;
}

}  // namespace urtest
