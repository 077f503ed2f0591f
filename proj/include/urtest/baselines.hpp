#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "urtest/acov.hpp"
#include "urtest/result.hpp"
#include "urtest/series.hpp"

namespace urtest {

// Simulated quantiles of the no-constant Dickey-Fuller t distribution,
// keyed by test size. Reproducible from (n, paths, seed).
struct CriticalValueTable {
  std::size_t n = 0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> quantiles;  // (size, quantile), sorted

  double quantile(double size) const;
  bool has(double size) const;
};

// Conventional defaults: k_max = floor(12 (n/100)^{1/4}) for the ADF lag
// search, p_max = floor(10 log10 n) for the AR sieve.
std::size_t default_k_max(std::size_t n);
std::size_t default_p_max(std::size_t n);

// --- ADF with MAIC lag selection -------------------------------------------

// Augmented regression dy_t = phi0 y_{t-1} + sum_j b_j dy_{t-j} + e_t,
// no intercept, fitted on 1-based rows t = t_first..n.
struct AdfFit {
  double phi0 = 0.0;
  double t_stat = 0.0;
  double s2 = 0.0;          // ols residual variance, dof-adjusted
  double rss = 0.0;
  double sum_sq_ylag = 0.0; // over the fitted rows
  std::size_t nobs = 0;
  std::size_t k = 0;
};

AdfFit adf_fit(const Series& y, std::size_t k, std::size_t t_first);

std::size_t maic_select(const Series& y, std::size_t k_max);

TestResult adf_test(const Series& y, std::size_t k_max, double size,
                    const CriticalValueTable& cv);

// --- Flat-top pivoted PP ----------------------------------------------------

double flat_top_lrv(const AutocovSeq& acov, std::size_t l, const KernelSpec& k);
double flat_top_lrv(std::span<const double> resid, std::size_t l,
                    const KernelSpec& k);

// Semiparametric correction of the Dickey-Fuller ratio:
// Z = t sqrt(gamma0/lrv) - (lrv - gamma0) / (2 sqrt(lrv) sqrt(n^{-2} sum y_{t-1}^2)).
double pp_z_stat(const Ar1Fit& fit, double lrv, double gamma0);

TestResult fpp_test(const Series& y, double size, const BandwidthRule& rule,
                    const CriticalValueTable& cv,
                    const KernelSpec& kernel = KernelSpec::trapezoid());

// --- Circular block bootstrap PP --------------------------------------------

// Copies ceil(n/b) blocks of length b starting at the given 0-based indices,
// reading circularly, truncated to n values.
std::vector<double> cbb_resample_from_starts(std::span<const double> v,
                                             std::size_t b,
                                             std::span<const std::size_t> starts);

std::vector<double> cbb_resample(std::span<const double> v, std::size_t b,
                                 std::mt19937_64& rng);

// Automatic block length for the circular bootstrap, clamped to [1, ceil(n/3)].
std::size_t cbb_block_length(std::span<const double> v);

// Fixed fallback b = ceil(n^{1/3}).
std::size_t cbb_block_length_fallback(std::size_t n);

TestResult cbb_pp_test(const Series& y, std::size_t B, double size,
                       std::uint64_t seed,
                       std::optional<std::size_t> block_length = std::nullopt);

// --- AR-sieve bootstrap ADF -------------------------------------------------

struct ArSieveFit {
  std::vector<double> coeffs;       // AR coefficients a_1..a_p
  std::vector<double> innovations;  // centered empirical innovations
};

ArSieveFit ar_sieve_fit(std::span<const double> resid_centered,
                        std::size_t p_max);

TestResult arb_adf_test(const Series& y, std::size_t B, double size,
                        std::size_t k_max, std::uint64_t seed);

// --- Dickey-Fuller critical values ------------------------------------------

CriticalValueTable make_cv_table(std::size_t n, std::size_t paths,
                                 std::uint64_t seed,
                                 std::span<const double> sizes);

double df_critical_value(double size, std::size_t n, std::size_t paths,
                         std::uint64_t seed);

// Cache file: one `size,quantile` row per line after a header recording
// n, paths and seed. read returns nothing when the file is absent, malformed
// or was built with different parameters.
void write_cv_table(const CriticalValueTable& table, const std::string& path);
std::optional<CriticalValueTable> read_cv_table(const std::string& path);

// In-process memoized (and optionally disk-cached) table lookup.
const CriticalValueTable& cv_table_cached(std::size_t n, std::size_t paths,
                                          std::uint64_t seed,
                                          std::span<const double> sizes,
                                          const std::string& cache_dir = "");

}  // namespace urtest
