#include "urtest/acov.hpp"

#include <algorithm>
#include <cmath>

namespace urtest {

std::size_t BandwidthRule::Kn(std::size_t n) const {
  const double k = std::ceil(std::sqrt(std::log10(static_cast<double>(n))));
  return std::max<std::size_t>(5, static_cast<std::size_t>(k));
}

AutocovSeq sample_autocov(std::span<const double> v, std::size_t max_lag) {
  if (v.empty()) fail(errc::empty_input, "sample_autocov: empty input");
  const std::size_t n = v.size();
  if (max_lag >= n)
    fail(errc::invalid_argument, "sample_autocov: max_lag must be < length");
  AutocovSeq out;
  out.n = n;
  out.gamma.resize(max_lag + 1);
  for (std::size_t h = 0; h <= max_lag; ++h) {
    double s = 0.0;
    for (std::size_t t = h; t < n; ++t) s += v[t] * v[t - h];
    out.gamma[h] = s / static_cast<double>(n);
  }
  return out;
}

double kernel_weight(double x, const KernelSpec& k) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  if (ax <= k.c_kappa) return 2.0 - ax;
  return 0.0;
}

std::size_t select_bandwidth(const AutocovSeq& acov, const BandwidthRule& rule) {
  const std::size_t n = acov.n;
  if (n < 8) fail(errc::insufficient_data, "select_bandwidth: need n >= 8");
  if (rule.mode == BandwidthRule::Mode::fixed) {
    const double l = std::ceil(std::pow(static_cast<double>(n), rule.fixed_exponent));
    return std::max<std::size_t>(1, static_cast<std::size_t>(l));
  }
  if (acov.gamma.empty() || acov.gamma[0] == 0.0)
    fail(errc::zero_variance, "select_bandwidth: gamma(0) is zero");

  const double gamma0 = acov.gamma[0];
  const double nd = static_cast<double>(n);
  const double threshold = rule.c * std::sqrt(std::log(nd) / nd);
  const std::size_t kn = rule.Kn(n);
  const std::size_t cap = std::max<std::size_t>(1, n / 4);

  auto rho = [&](std::size_t h) -> double {
    return h < acov.gamma.size() ? acov.gamma[h] / gamma0 : 0.0;
  };
  for (std::size_t l = 1; l < cap; ++l) {
    bool quiet = true;
    for (std::size_t k = 1; k <= kn; ++k) {
      if (std::abs(rho(l + k)) >= threshold) {
        quiet = false;
        break;
      }
    }
    if (quiet) return l;
  }
  return cap;
}

Eigen::MatrixXd tapered_matrix(const AutocovSeq& acov, std::size_t l,
                               const KernelSpec& k) {
  const auto n = static_cast<Eigen::Index>(acov.n);
  const double ld = static_cast<double>(l);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto h = static_cast<std::size_t>(i - j);
      const double g = h < acov.gamma.size() ? acov.gamma[h] : 0.0;
      const double val = kernel_weight(static_cast<double>(h) / ld, k) * g;
      m(i, j) = val;
      m(j, i) = val;
    }
  }
  return m;
}

SigmaHat build_sigma_hat(const AutocovSeq& acov, std::size_t l,
                         const KernelSpec& k) {
  if (l < 1) fail(errc::invalid_argument, "build_sigma_hat: bandwidth must be >= 1");
  if (acov.gamma.empty() || !(acov.gamma[0] > 0.0))
    fail(errc::zero_variance, "build_sigma_hat: gamma(0) must be positive");

  Eigen::MatrixXd tapered = tapered_matrix(acov, l, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tapered);
  if (es.info() != Eigen::Success)
    fail(errc::eigen_failure, "build_sigma_hat: eigensolver did not converge");

  SigmaHat out;
  out.bandwidth = l;
  out.floor_value = acov.gamma[0] / static_cast<double>(acov.n);

  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d(j) < out.floor_value) {
      d(j) = out.floor_value;
      ++out.floored_count;
    }
  }
  Eigen::MatrixXd m =
      es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  out.matrix = 0.5 * (m + m.transpose());  // exact symmetry

  Eigen::LLT<Eigen::MatrixXd> llt(out.matrix);
  if (llt.info() != Eigen::Success)
    fail(errc::eigen_failure, "build_sigma_hat: Cholesky factorization failed");
  out.chol = llt.matrixL();
  out.sigma_star_sq = out.matrix.sum() / static_cast<double>(acov.n);
  return out;
}

SigmaHat SigmaHat::identity(std::size_t n) {
  SigmaHat s;
  const auto ni = static_cast<Eigen::Index>(n);
  s.matrix = Eigen::MatrixXd::Identity(ni, ni);
  s.chol = Eigen::MatrixXd::Identity(ni, ni);
  s.bandwidth = 1;
  s.floor_value = 1.0 / static_cast<double>(n);
  s.floored_count = 0;
  s.sigma_star_sq = 1.0;
  return s;
}

std::vector<double> whiten(const SigmaHat& s, std::span<const double> v) {
  const std::size_t n = s.size();
  if (v.size() != n) fail(errc::invalid_argument, "whiten: length mismatch");
  for (std::size_t j = 0; j < n; ++j)
    if (!(s.chol(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) > 0.0))
      fail(errc::singular_factor, "whiten: nonpositive Cholesky diagonal");
  std::vector<double> out(n);
  // Forward substitution on the lower-triangular factor.
  for (std::size_t i = 0; i < n; ++i) {
    double acc = v[i];
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < i; ++j)
      acc -= s.chol(ii, static_cast<Eigen::Index>(j)) * out[j];
    out[i] = acc / s.chol(ii, ii);
  }
  return out;
}

std::vector<double> color(const SigmaHat& s, std::span<const double> eps) {
  const std::size_t n = s.size();
  if (eps.size() != n) fail(errc::invalid_argument, "color: length mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j <= i; ++j)
      acc += s.chol(ii, static_cast<Eigen::Index>(j)) * eps[j];
    out[i] = acc;
  }
  return out;
}

}  // namespace urtest
