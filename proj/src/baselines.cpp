#include "urtest/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "urtest/lpb.hpp"
#include "urtest/rng.hpp"

namespace urtest {

namespace {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

double CriticalValueTable::quantile(double size) const {
  for (const auto& [s, q] : quantiles)
    if (std::abs(s - size) < 1e-12) return q;
  fail(errc::invalid_argument, "CriticalValueTable: no quantile for requested size");
}

bool CriticalValueTable::has(double size) const {
  for (const auto& [s, q] : quantiles)
    if (std::abs(s - size) < 1e-12) return true;
  return false;
}

std::size_t default_k_max(std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

std::size_t default_p_max(std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(10.0 * std::log10(static_cast<double>(n))));
}

// --- ADF --------------------------------------------------------------------

AdfFit adf_fit(const Series& y, std::size_t k, std::size_t t_first) {
  const auto& v = y.values();
  const std::size_t n = v.size();
  if (t_first < k + 2)
    fail(errc::invalid_argument, "adf_fit: t_first must be >= k + 2");
  if (t_first > n)
    fail(errc::insufficient_data, "adf_fit: no regression rows");
  const std::size_t rows = n - t_first + 1;
  const std::size_t cols = k + 1;
  if (rows <= cols)
    fail(errc::insufficient_data, "adf_fit: fewer rows than coefficients");

  // 1-based time t maps to v[t-1]; dy_t = v[t-1] - v[t-2].
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd z(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = t_first + r;
    z(static_cast<Eigen::Index>(r)) = v[t - 1] - v[t - 2];
    x(static_cast<Eigen::Index>(r), 0) = v[t - 2];
    for (std::size_t j = 1; j <= k; ++j)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          v[t - j - 1] - v[t - j - 2];
  }

  AdfFit fit;
  fit.k = k;
  fit.nobs = rows;
  fit.sum_sq_ylag = x.col(0).squaredNorm();
  if (fit.sum_sq_ylag == 0.0)
    fail(errc::degenerate_regressor, "adf_fit: lagged level is identically zero");

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xtz = x.transpose() * z;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  if (ldlt.info() != Eigen::Success)
    fail(errc::eigen_failure, "adf_fit: normal equations not solvable");
  const Eigen::VectorXd coef = ldlt.solve(xtz);

  fit.phi0 = coef(0);
  fit.rss = (z - x * coef).squaredNorm();
  fit.s2 = fit.rss / static_cast<double>(rows - cols);
  if (fit.s2 == 0.0)
    fail(errc::zero_residual_variance, "adf_fit: exact fit, t-statistic undefined");
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  e0(0) = 1.0;
  const double inv00 = ldlt.solve(e0)(0);
  fit.t_stat = fit.phi0 / std::sqrt(fit.s2 * inv00);
  return fit;
}

std::size_t maic_select(const Series& y, std::size_t k_max) {
  const auto& v = y.values();
  const std::size_t n = v.size();
  if (n < 2 * k_max + 3 || n <= k_max + 2)
    fail(errc::insufficient_data, "maic_select: series too short for k_max");

  // All candidates are fitted on the common sample t = k_max+2..n, so the
  // criterion compares like with like. Candidate k uses the first k+1
  // columns of the widest design, so one cross-product matrix serves every
  // lag order.
  const std::size_t t_first = k_max + 2;
  const std::size_t rows = n - t_first + 1;
  const std::size_t cols = k_max + 1;
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd z(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = t_first + r;
    z(static_cast<Eigen::Index>(r)) = v[t - 1] - v[t - 2];
    x(static_cast<Eigen::Index>(r), 0) = v[t - 2];
    for (std::size_t j = 1; j <= k_max; ++j)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          v[t - j - 1] - v[t - j - 2];
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xtz = x.transpose() * z;
  const double ztz = z.squaredNorm();
  if (xtx(0, 0) == 0.0)
    fail(errc::degenerate_regressor, "maic_select: lagged level is identically zero");

  const double common = static_cast<double>(rows);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const auto dim = static_cast<Eigen::Index>(k + 1);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx.topLeftCorner(dim, dim));
    if (ldlt.info() != Eigen::Success)
      fail(errc::eigen_failure, "maic_select: normal equations not solvable");
    const Eigen::VectorXd coef = ldlt.solve(xtz.head(dim));
    const double rss = std::max(0.0, ztz - coef.dot(xtz.head(dim)));
    const double sigma2 =
        std::max(rss / common, std::numeric_limits<double>::min());
    const double tau = coef(0) * coef(0) * xtx(0, 0) / sigma2;
    const double maic =
        std::log(sigma2) + 2.0 * (tau + static_cast<double>(k)) /
                               static_cast<double>(n - k_max);
    if (maic < best) {
      best = maic;
      best_k = k;
    }
  }
  return best_k;
}

TestResult adf_test(const Series& y, std::size_t k_max, double size,
                    const CriticalValueTable& cv) {
  const std::size_t k = maic_select(y, k_max);
  const AdfFit fit = adf_fit(y, k, k + 2);  // refit on the full usable sample
  const double q = cv.quantile(size);

  TestResult result;
  result.method = Method::adf;
  result.statistic = fit.t_stat;
  result.reject = fit.t_stat < q;
  result.nuisance["k"] = static_cast<double>(k);
  result.nuisance["cv"] = q;
  result.nuisance["size"] = size;
  return result;
}

// --- Flat-top pivoted PP ----------------------------------------------------

double flat_top_lrv(const AutocovSeq& acov, std::size_t l, const KernelSpec& k) {
  if (l < 1) fail(errc::invalid_argument, "flat_top_lrv: bandwidth must be >= 1");
  if (acov.gamma.empty()) fail(errc::empty_input, "flat_top_lrv: empty autocovariances");
  const auto reach = static_cast<std::size_t>(
      std::floor(k.c_kappa * static_cast<double>(l)));
  const std::size_t hmax = std::min(acov.gamma.size() - 1, reach);
  double lrv = acov.gamma[0];
  for (std::size_t h = 1; h <= hmax; ++h)
    lrv += 2.0 * kernel_weight(static_cast<double>(h) / static_cast<double>(l), k) *
           acov.gamma[h];
  if (lrv <= 0.0) {
    // Flat-top sums can go negative; keep the pivot defined.
    lrv = acov.gamma[0] / static_cast<double>(acov.n);
    if (lrv <= 0.0) lrv = std::numeric_limits<double>::min();
  }
  return lrv;
}

double flat_top_lrv(std::span<const double> resid, std::size_t l,
                    const KernelSpec& k) {
  if (resid.empty()) fail(errc::empty_input, "flat_top_lrv: empty residuals");
  const auto reach = static_cast<std::size_t>(
      std::floor(k.c_kappa * static_cast<double>(l)));
  const std::size_t max_lag = std::min(resid.size() - 1, reach);
  return flat_top_lrv(sample_autocov(resid, max_lag), l, k);
}

double pp_z_stat(const Ar1Fit& fit, double lrv, double gamma0) {
  if (!(lrv > 0.0)) fail(errc::nonpositive_lrv, "pp_z_stat: lrv must be positive");
  if (gamma0 < 0.0) fail(errc::invalid_argument, "pp_z_stat: gamma0 must be >= 0");
  const double n = static_cast<double>(fit.n_used);
  const double scale = std::sqrt(fit.sum_sq_lag / (n * n));
  return fit.t_stat * std::sqrt(gamma0 / lrv) -
         (lrv - gamma0) / (2.0 * std::sqrt(lrv) * scale);
}

TestResult fpp_test(const Series& y, double size, const BandwidthRule& rule,
                    const CriticalValueTable& cv, const KernelSpec& kernel) {
  if (y.size() < 9)
    fail(errc::insufficient_data,
         "fpp_test: need at least 9 observations (8 residuals)");
  const Ar1Fit fit = fit_ar1(y);
  const AutocovSeq acov = sample_autocov(fit.residuals, fit.residuals.size() - 1);
  const std::size_t l = select_bandwidth(acov, rule);
  const double lrv = flat_top_lrv(acov, l, kernel);
  const double z = pp_z_stat(fit, lrv, acov.gamma[0]);
  const double q = cv.quantile(size);

  TestResult result;
  result.method = Method::fpp;
  result.statistic = z;
  result.reject = z < q;
  result.nuisance["l"] = static_cast<double>(l);
  result.nuisance["lambda_sq"] = lrv;
  result.nuisance["gamma0"] = acov.gamma[0];
  result.nuisance["cv"] = q;
  result.nuisance["size"] = size;
  return result;
}

// --- Circular block bootstrap PP --------------------------------------------

std::vector<double> cbb_resample_from_starts(std::span<const double> v,
                                             std::size_t b,
                                             std::span<const std::size_t> starts) {
  const std::size_t n = v.size();
  if (n == 0) fail(errc::empty_input, "cbb_resample: empty input");
  if (b < 1 || b > n)
    fail(errc::invalid_argument, "cbb_resample: block length out of range");
  const std::size_t blocks = (n + b - 1) / b;
  if (starts.size() != blocks)
    fail(errc::invalid_argument, "cbb_resample: wrong number of block starts");
  std::vector<double> out;
  out.reserve(blocks * b);
  for (std::size_t s : starts) {
    if (s >= n) fail(errc::invalid_argument, "cbb_resample: start out of range");
    for (std::size_t j = 0; j < b; ++j) out.push_back(v[(s + j) % n]);
  }
  out.resize(n);
  return out;
}

std::vector<double> cbb_resample(std::span<const double> v, std::size_t b,
                                 std::mt19937_64& rng) {
  const std::size_t n = v.size();
  if (n == 0) fail(errc::empty_input, "cbb_resample: empty input");
  if (b < 1 || b > n)
    fail(errc::invalid_argument, "cbb_resample: block length out of range");
  const std::size_t blocks = (n + b - 1) / b;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> starts(blocks);
  for (auto& s : starts) s = pick(rng);
  return cbb_resample_from_starts(v, b, starts);
}

std::size_t cbb_block_length_fallback(std::size_t n) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(std::cbrt(static_cast<double>(n)))));
}

// Automatic block-length selection for the circular bootstrap: find the lag
// after which K_n consecutive correlations are negligible, then plug the
// flat-top-weighted spectral sums into b = (2 G^2 / D N^{-1})^{... } with the
// circular-bootstrap constant D = (4/3) g(0)^2.
std::size_t cbb_block_length(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 8) fail(errc::insufficient_data, "cbb_block_length: need n >= 8");
  const double nd = static_cast<double>(n);
  const std::size_t cap =
      static_cast<std::size_t>(std::ceil(nd / 3.0));

  const std::size_t kn = std::max<std::size_t>(
      5, static_cast<std::size_t>(std::ceil(std::sqrt(std::log10(nd)))));
  const std::size_t scan_max =
      static_cast<std::size_t>(std::ceil(std::sqrt(nd))) + kn;
  const std::size_t max_lag = std::min(n - 1, 2 * (scan_max + kn));
  const AutocovSeq acov = sample_autocov(v, max_lag);
  if (acov.gamma[0] == 0.0)
    fail(errc::zero_variance, "cbb_block_length: zero variance input");

  const double threshold = 2.0 * std::sqrt(std::log10(nd) / nd);
  auto rho = [&](std::size_t h) -> double {
    return h < acov.gamma.size() ? acov.gamma[h] / acov.gamma[0] : 0.0;
  };
  std::size_t m_hat = scan_max;
  for (std::size_t m = 1; m < scan_max; ++m) {
    bool quiet = true;
    for (std::size_t k = 1; k <= kn; ++k) {
      if (std::abs(rho(m + k)) >= threshold) {
        quiet = false;
        break;
      }
    }
    if (quiet) {
      m_hat = m;
      break;
    }
  }

  const std::size_t big_m = 2 * m_hat;
  auto lambda = [](double t) -> double {
    const double at = std::abs(t);
    if (at <= 0.5) return 1.0;
    if (at <= 1.0) return 2.0 * (1.0 - at);
    return 0.0;
  };
  auto gamma_at = [&](std::size_t h) -> double {
    return h < acov.gamma.size() ? acov.gamma[h] : 0.0;
  };
  double g0 = gamma_at(0);
  double g_sum = 0.0;
  for (std::size_t h = 1; h <= big_m; ++h) {
    const double w = lambda(static_cast<double>(h) / static_cast<double>(big_m));
    g0 += 2.0 * w * gamma_at(h);
    g_sum += 2.0 * w * static_cast<double>(h) * gamma_at(h);
  }
  const double d_cb = (4.0 / 3.0) * g0 * g0;
  std::size_t b = 1;
  if (d_cb > 0.0 && g_sum != 0.0) {
    const double b_opt = std::cbrt(2.0 * g_sum * g_sum / d_cb * nd);
    b = static_cast<std::size_t>(std::max(1.0, std::ceil(b_opt)));
  }
  return std::clamp<std::size_t>(b, 1, std::max<std::size_t>(1, cap));
}

TestResult cbb_pp_test(const Series& y, std::size_t B, double size,
                       std::uint64_t seed,
                       std::optional<std::size_t> block_length) {
  if (B < 1) fail(errc::invalid_argument, "cbb_pp_test: B must be >= 1");
  if (!(size > 0.0 && size < 1.0))
    fail(errc::invalid_argument, "cbb_pp_test: size must be in (0,1)");
  if (y.size() < 9)
    fail(errc::insufficient_data,
         "cbb_pp_test: need at least 9 observations (8 residuals)");

  const Ar1Fit fit = fit_ar1(y);
  const std::vector<double> w = center(fit.residuals);
  const std::size_t b = block_length ? *block_length : cbb_block_length(w);

  BootstrapRun run;
  run.B = B;
  run.seed = seed;
  run.phi_observed = fit.phi_hat;
  run.t_observed = fit.t_stat;
  run.phi_reps.resize(B);
  run.t_reps.resize(B);
  for (std::size_t i = 0; i < B; ++i) {
    bool done = false;
    for (std::uint64_t attempt = 0; attempt < 3 && !done; ++attempt) {
      auto rng = make_rng(seed, {stream::replicate, i, attempt});
      try {
        const std::vector<double> v_star = cbb_resample(w, b, rng);
        const Ar1Fit star = fit_ar1(integrate(v_star));
        run.phi_reps[i] = star.phi_hat;
        run.t_reps[i] = star.t_stat;
        done = true;
      } catch (const Error& e) {
        if (e.code() != errc::zero_residual_variance &&
            e.code() != errc::degenerate_regressor)
          throw;
      }
    }
    if (!done)
      fail(errc::replicate_failure, "cbb_pp_test: replicate kept degenerating");
  }
  run.p_phi = bootstrap_pvalue(run.phi_observed, run.phi_reps);
  run.p_t = bootstrap_pvalue(run.t_observed, run.t_reps);

  TestResult result;
  result.method = Method::cbb_pp;
  result.statistic = run.t_observed;
  result.p_value = run.p_t;
  result.reject = run.p_t < size;
  result.nuisance["b"] = static_cast<double>(b);
  result.nuisance["B"] = static_cast<double>(B);
  result.nuisance["size"] = size;
  result.nuisance["p_phi"] = run.p_phi;
  result.nuisance["reject_phi"] = run.p_phi < size ? 1.0 : 0.0;
  result.bootstrap = std::move(run);
  return result;
}

// --- AR-sieve bootstrap ADF -------------------------------------------------

namespace {

struct ArLsFit {
  Eigen::VectorXd coef;
  double rss = 0.0;
  std::size_t rows = 0;
};

// Least-squares AR(p) on rows t = t_first..T of w (1-based), no intercept.
ArLsFit ar_ls_fit(std::span<const double> w, std::size_t p, std::size_t t_first) {
  const std::size_t total = w.size();
  const std::size_t rows = total - t_first + 1;
  ArLsFit out;
  out.rows = rows;
  if (p == 0) {
    double rss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double e = w[t_first - 1 + r];
      rss += e * e;
    }
    out.rss = rss;
    return out;
  }
  Eigen::MatrixXd x(rows, p);
  Eigen::VectorXd z(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = t_first + r;
    z(static_cast<Eigen::Index>(r)) = w[t - 1];
    for (std::size_t j = 1; j <= p; ++j)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j - 1)) =
          w[t - 1 - j];
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(x.transpose() * x);
  if (ldlt.info() != Eigen::Success)
    fail(errc::eigen_failure, "ar_sieve_fit: normal equations not solvable");
  out.coef = ldlt.solve(x.transpose() * z);
  out.rss = (z - x * out.coef).squaredNorm();
  return out;
}

}  // namespace

ArSieveFit ar_sieve_fit(std::span<const double> resid_centered,
                        std::size_t p_max) {
  const std::size_t total = resid_centered.size();
  if (total <= p_max + 2)
    fail(errc::insufficient_data, "ar_sieve_fit: series too short for p_max");
  // Shrink the search range so even the largest candidate keeps two degrees
  // of freedom on the common sample.
  std::size_t p_hi = p_max;
  while (p_hi > 0 && total < 2 * p_hi + 2) --p_hi;

  const std::size_t t_first = p_hi + 1;
  const double common = static_cast<double>(total - p_hi);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_p = 0;
  for (std::size_t p = 0; p <= p_hi; ++p) {
    const ArLsFit fit = ar_ls_fit(resid_centered, p, t_first);
    const double sigma2 =
        std::max(fit.rss / common, std::numeric_limits<double>::min());
    const double aic = std::log(sigma2) + 2.0 * static_cast<double>(p) / common;
    if (aic < best) {
      best = aic;
      best_p = p;
    }
  }

  ArSieveFit out;
  const ArLsFit refit = ar_ls_fit(resid_centered, best_p, best_p + 1);
  out.coeffs.assign(refit.coef.data(), refit.coef.data() + refit.coef.size());
  std::vector<double> innov;
  if (best_p == 0) {
    innov.assign(resid_centered.begin(), resid_centered.end());
  } else {
    innov.resize(total - best_p);
    for (std::size_t t = best_p + 1; t <= total; ++t) {
      double pred = 0.0;
      for (std::size_t j = 1; j <= best_p; ++j)
        pred += out.coeffs[j - 1] * resid_centered[t - 1 - j];
      innov[t - best_p - 1] = resid_centered[t - 1] - pred;
    }
  }
  out.innovations = center(innov);
  return out;
}

TestResult arb_adf_test(const Series& y, std::size_t B, double size,
                        std::size_t k_max, std::uint64_t seed) {
  if (B < 1) fail(errc::invalid_argument, "arb_adf_test: B must be >= 1");
  if (!(size > 0.0 && size < 1.0))
    fail(errc::invalid_argument, "arb_adf_test: size must be in (0,1)");

  const std::size_t k_obs = maic_select(y, k_max);
  const AdfFit observed = adf_fit(y, k_obs, k_obs + 2);

  const Ar1Fit first_stage = fit_ar1(y);
  const std::vector<double> w = center(first_stage.residuals);
  const std::size_t m = w.size();
  const ArSieveFit sieve = ar_sieve_fit(w, default_p_max(m));
  const std::size_t p = sieve.coeffs.size();
  const std::size_t burn = 5 * p;

  BootstrapRun run;
  run.B = B;
  run.seed = seed;
  run.phi_observed = 1.0 + observed.phi0;
  run.t_observed = observed.t_stat;
  run.phi_reps.resize(B);
  run.t_reps.resize(B);
  const std::size_t pool = sieve.innovations.size();
  for (std::size_t i = 0; i < B; ++i) {
    bool done = false;
    for (std::uint64_t attempt = 0; attempt < 3 && !done; ++attempt) {
      auto rng = make_rng(seed, {stream::replicate, i, attempt});
      std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
      try {
        // Rebuild noise through the sieve recursion from resampled
        // innovations, zero pre-sample values, burn-in discarded.
        std::vector<double> noise(m + burn);
        for (std::size_t t = 0; t < m + burn; ++t) {
          double val = sieve.innovations[pick(rng)];
          for (std::size_t j = 1; j <= p && j <= t; ++j)
            val += sieve.coeffs[j - 1] * noise[t - j];
          noise[t] = val;
        }
        std::vector<double> walk(m);
        double acc = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
          acc += noise[burn + t];
          walk[t] = acc;
        }
        const Series y_star(std::move(walk));
        const std::size_t k_star = maic_select(y_star, k_max);
        const AdfFit star = adf_fit(y_star, k_star, k_star + 2);
        run.phi_reps[i] = 1.0 + star.phi0;
        run.t_reps[i] = star.t_stat;
        done = true;
      } catch (const Error& e) {
        if (e.code() != errc::zero_residual_variance &&
            e.code() != errc::degenerate_regressor)
          throw;
      }
    }
    if (!done)
      fail(errc::replicate_failure, "arb_adf_test: replicate kept degenerating");
  }
  run.p_phi = bootstrap_pvalue(run.phi_observed, run.phi_reps);
  run.p_t = bootstrap_pvalue(run.t_observed, run.t_reps);

  TestResult result;
  result.method = Method::arb_adf;
  result.statistic = run.t_observed;
  result.p_value = run.p_t;
  result.reject = run.p_t < size;
  result.nuisance["k"] = static_cast<double>(k_obs);
  result.nuisance["p"] = static_cast<double>(p);
  result.nuisance["B"] = static_cast<double>(B);
  result.nuisance["size"] = size;
  result.nuisance["p_phi"] = run.p_phi;
  result.nuisance["reject_phi"] = run.p_phi < size ? 1.0 : 0.0;
  result.bootstrap = std::move(run);
  return result;
}

// --- Dickey-Fuller critical values ------------------------------------------

namespace {

std::vector<double> simulate_df_stats(std::size_t n, std::size_t paths,
                                      std::uint64_t seed) {
  if (n < 3) fail(errc::invalid_argument, "df critical values: n must be >= 3");
  if (paths < 2) fail(errc::invalid_argument, "df critical values: too few paths");
  std::vector<double> stats(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    auto rng = make_rng(seed, {stream::critval, p});
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> walk(n);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += normal(rng);
      walk[t] = acc;
    }
    stats[p] = fit_ar1(Series(std::move(walk))).t_stat;
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

CriticalValueTable make_cv_table(std::size_t n, std::size_t paths,
                                 std::uint64_t seed,
                                 std::span<const double> sizes) {
  for (double s : sizes)
    if (!(s > 0.0 && s < 1.0))
      fail(errc::invalid_argument, "make_cv_table: sizes must lie in (0,1)");
  const std::vector<double> stats = simulate_df_stats(n, paths, seed);
  CriticalValueTable table;
  table.n = n;
  table.paths = paths;
  table.seed = seed;
  for (double s : sizes) table.quantiles.emplace_back(s, sorted_quantile(stats, s));
  std::sort(table.quantiles.begin(), table.quantiles.end());
  return table;
}

double df_critical_value(double size, std::size_t n, std::size_t paths,
                         std::uint64_t seed) {
  if (!(size > 0.0 && size < 1.0))
    fail(errc::invalid_argument, "df_critical_value: size must be in (0,1)");
  if (paths < 10000)
    fail(errc::invalid_argument, "df_critical_value: need at least 10^4 paths");
  const double sizes[] = {size};
  return make_cv_table(n, paths, seed, sizes).quantile(size);
}

void write_cv_table(const CriticalValueTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "write_cv_table: cannot open " + path);
  out << "# n=" << table.n << " paths=" << table.paths << " seed=" << table.seed
      << "\n";
  out << "size,quantile\n";
  for (const auto& [s, q] : table.quantiles)
    out << format_double(s) << "," << format_double(q) << "\n";
  if (!out) fail(errc::io_error, "write_cv_table: write failed for " + path);
}

std::optional<CriticalValueTable> read_cv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  CriticalValueTable table;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  unsigned long long n = 0, paths = 0, seed = 0;
  if (std::sscanf(line.c_str(), "# n=%llu paths=%llu seed=%llu", &n, &paths,
                  &seed) != 3)
    return std::nullopt;
  table.n = n;
  table.paths = paths;
  table.seed = seed;
  if (!std::getline(in, line) || line != "size,quantile") return std::nullopt;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) return std::nullopt;
    try {
      const double s = std::stod(line.substr(0, comma));
      const double q = std::stod(line.substr(comma + 1));
      table.quantiles.emplace_back(s, q);
    } catch (...) {
      return std::nullopt;
    }
  }
  if (table.quantiles.empty()) return std::nullopt;
  return table;
}

const CriticalValueTable& cv_table_cached(std::size_t n, std::size_t paths,
                                          std::uint64_t seed,
                                          std::span<const double> sizes,
                                          const std::string& cache_dir) {
  using Key = std::tuple<std::size_t, std::size_t, std::uint64_t,
                         std::vector<double>>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<CriticalValueTable>> cache;

  std::vector<double> wanted(sizes.begin(), sizes.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  Key key{n, paths, seed, wanted};

  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  std::string file;
  if (!cache_dir.empty()) {
    file = cache_dir + "/dfcv_n" + std::to_string(n) + "_p" +
           std::to_string(paths) + "_s" + std::to_string(seed) + ".csv";
    if (auto disk = read_cv_table(file)) {
      const bool match = disk->n == n && disk->paths == paths && disk->seed == seed;
      bool covers = match;
      for (double s : wanted)
        if (!disk->has(s)) covers = false;
      if (covers) {
        auto owned = std::make_unique<CriticalValueTable>(std::move(*disk));
        const auto& ref = *owned;
        cache.emplace(std::move(key), std::move(owned));
        return ref;
      }
    }
  }

  auto owned =
      std::make_unique<CriticalValueTable>(make_cv_table(n, paths, seed, wanted));
  if (!file.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) {
      try {
        write_cv_table(*owned, file);
      } catch (const Error&) {
        // cache writes are best effort
      }
    }
  }
  const auto& ref = *owned;
  cache.emplace(std::move(key), std::move(owned));
  return ref;
}

}  // namespace urtest
