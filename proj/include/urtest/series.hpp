#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "urtest/errors.hpp"

namespace urtest {

// Ordered sequence of finite real observations. A series built by
// integrate() knows its process started at zero; fit_ar1 then includes the
// (Y_0 = 0, Y_1) pair in the regression. Observed data carries no such
// assumption and is fitted on pairs t = 2..n only.
class Series {
 public:
  explicit Series(std::vector<double> values, bool origin_at_zero = false);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool origin_at_zero() const noexcept { return origin_at_zero_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
  bool origin_at_zero_;
};

// OLS fit of Y_t = phi Y_{t-1} + V_t with no intercept and no trend.
// t_stat is the Dickey-Fuller ratio (phi_hat - 1) / se(phi_hat).
struct Ar1Fit {
  double phi_hat = 0.0;
  double t_stat = 0.0;
  std::vector<double> residuals;  // V_t = Y_t - phi_hat * Y_{t-1}, one per pair
  double s2 = 0.0;                // sum(V^2) / (n_used - 1)
  double sum_sq_lag = 0.0;        // sum of squared lagged regressors
  std::size_t n_used = 0;         // number of regression pairs
};

// Mean-zero, unit-population-variance rescaling of a vector.
struct StandardizedVector {
  std::vector<double> values;
  double original_mean = 0.0;
  double original_scale = 1.0;  // population standard deviation of the input
};

Ar1Fit fit_ar1(const Series& y);

std::vector<double> center(std::span<const double> v);

StandardizedVector standardize(std::span<const double> v);

// Cumulative sums of the noise, Y_t = sum_{s<=t} V_s, with origin-at-zero set.
Series integrate(std::span<const double> noise);

double mean_of(std::span<const double> v);

}  // namespace urtest
