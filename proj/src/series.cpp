#include "urtest/series.hpp"

#include <cmath>
#include <numeric>

namespace urtest {

Series::Series(std::vector<double> values, bool origin_at_zero)
    : values_(std::move(values)), origin_at_zero_(origin_at_zero) {
  const std::size_t min_len = origin_at_zero_ ? 1 : 2;
  if (values_.size() < min_len)
    fail(errc::insufficient_data, "Series: too few observations");
  for (double x : values_)
    if (!std::isfinite(x))
      fail(errc::invalid_argument, "Series: non-finite observation");
}

double mean_of(std::span<const double> v) {
  if (v.empty()) fail(errc::empty_input, "mean_of: empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Ar1Fit fit_ar1(const Series& y) {
  const auto& v = y.values();
  // Regression pairs (Y_{t-1}, Y_t). A known origin contributes the
  // (0, Y_1) pair; it adds nothing to the sums but does count toward the
  // degrees of freedom, matching the constructed-series convention.
  const std::size_t pairs = y.origin_at_zero() ? v.size() : v.size() - 1;
  if (pairs < 2)
    fail(errc::insufficient_data, "fit_ar1: need at least two regression pairs");

  const std::size_t shift = y.origin_at_zero() ? 0 : 1;
  auto lagged = [&](std::size_t k) -> double {
    const std::size_t idx = k + shift;  // response index into v
    return idx == 0 ? 0.0 : v[idx - 1];
  };

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double x = lagged(k);
    sxx += x * x;
    sxy += x * v[k + shift];
  }
  if (sxx == 0.0)
    fail(errc::degenerate_regressor, "fit_ar1: all lagged values are zero");

  Ar1Fit fit;
  fit.phi_hat = sxy / sxx;
  fit.sum_sq_lag = sxx;
  fit.n_used = pairs;
  fit.residuals.resize(pairs);
  double rss = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double r = v[k + shift] - fit.phi_hat * lagged(k);
    fit.residuals[k] = r;
    rss += r * r;
  }
  fit.s2 = rss / static_cast<double>(pairs - 1);
  if (fit.s2 == 0.0)
    fail(errc::zero_residual_variance, "fit_ar1: exact fit, t-statistic undefined");
  fit.t_stat = (fit.phi_hat - 1.0) / std::sqrt(fit.s2 / sxx);
  return fit;
}

std::vector<double> center(std::span<const double> v) {
  const double m = mean_of(v);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - m;
  return out;
}

StandardizedVector standardize(std::span<const double> v) {
  if (v.size() < 2) fail(errc::insufficient_data, "standardize: need length >= 2");
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size());  // population variance
  if (var == 0.0) fail(errc::zero_variance, "standardize: all elements equal");
  StandardizedVector out;
  out.original_mean = m;
  out.original_scale = std::sqrt(var);
  out.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.values[i] = (v[i] - m) / out.original_scale;
  return out;
}

Series integrate(std::span<const double> noise) {
  if (noise.empty()) fail(errc::empty_input, "integrate: empty noise vector");
  std::vector<double> y(noise.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    acc += noise[i];
    y[i] = acc;
  }
  return Series(std::move(y), /*origin_at_zero=*/true);
}

}  // namespace urtest
