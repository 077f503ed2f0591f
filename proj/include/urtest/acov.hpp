#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "urtest/errors.hpp"

namespace urtest {

// Sample autocovariances gamma(0..max_lag) with divisor n. The input is used
// exactly as given; callers decide whether to center first.
struct AutocovSeq {
  std::vector<double> gamma;
  std::size_t n = 0;  // sample size behind the estimates
};

// Flat-top taper. Only the trapezoid instance is built in: weight 1 for
// |x| <= 1, then 2 - |x| down to the cutoff c_kappa = 2. Other shapes are a
// configuration extension point, not implemented.
struct KernelSpec {
  double c_kappa = 2.0;
  static KernelSpec trapezoid() noexcept { return {}; }
};

// Kernel bandwidth policy: either the adaptive correlogram scan or a fixed
// l = ceil(n^exponent).
struct BandwidthRule {
  enum class Mode { adaptive, fixed };
  Mode mode = Mode::adaptive;
  double c = 2.0;               // adaptive threshold constant
  double fixed_exponent = 0.25;

  static BandwidthRule adaptive(double c = 2.0) noexcept {
    BandwidthRule r;
    r.mode = Mode::adaptive;
    r.c = c;
    return r;
  }
  static BandwidthRule fixed(double exponent) noexcept {
    BandwidthRule r;
    r.mode = Mode::fixed;
    r.fixed_exponent = exponent;
    return r;
  }

  // Number of consecutive correlations that must clear the threshold:
  // max(5, ceil(sqrt(log10 n))), nondecreasing and o(log n).
  std::size_t Kn(std::size_t n) const;
};

// Eigen-floored tapered autocovariance matrix with its Cholesky factor.
// Positive definite by construction: every eigenvalue >= gamma(0)/n.
struct SigmaHat {
  Eigen::MatrixXd matrix;  // Sigma-hat, symmetric
  Eigen::MatrixXd chol;    // lower-triangular L with L L' = matrix
  std::size_t bandwidth = 0;
  double floor_value = 0.0;    // gamma(0)/n
  std::size_t floored_count = 0;
  double sigma_star_sq = 0.0;  // n^{-1} 1' Sigma-hat 1

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(matrix.rows());
  }
  static SigmaHat identity(std::size_t n);
};

AutocovSeq sample_autocov(std::span<const double> v, std::size_t max_lag);

double kernel_weight(double x, const KernelSpec& k);

// Smallest l >= 1 whose next Kn sample correlations all fall below
// c (log n / n)^{1/2}; capped at floor(n/4). Fixed mode returns
// ceil(n^exponent). Correlations at unavailable lags count as zero.
std::size_t select_bandwidth(const AutocovSeq& acov, const BandwidthRule& rule);

// The tapered matrix [kappa((i-j)/l) gamma(i-j)], before eigenvalue flooring.
Eigen::MatrixXd tapered_matrix(const AutocovSeq& acov, std::size_t l,
                               const KernelSpec& k);

SigmaHat build_sigma_hat(const AutocovSeq& acov, std::size_t l,
                         const KernelSpec& k);

// Solves L e = v by forward substitution (whitening); never forms an inverse.
std::vector<double> whiten(const SigmaHat& s, std::span<const double> v);

// Applies L to eps (coloring).
std::vector<double> color(const SigmaHat& s, std::span<const double> eps);

}  // namespace urtest
