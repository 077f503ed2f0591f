#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "urtest/acov.hpp"
#include "urtest/rng.hpp"
#include "urtest/series.hpp"

using namespace urtest;

namespace {

SigmaHat sigma_from_lll(std::vector<std::vector<double>> l) {
  // Hand-built SigmaHat from an explicit lower-triangular factor.
  const auto n = static_cast<Eigen::Index>(l.size());
  SigmaHat s;
  s.chol = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      s.chol(i, j) = l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  s.matrix = s.chol * s.chol.transpose();
  s.bandwidth = 1;
  s.floor_value = 0.0;
  s.sigma_star_sq = s.matrix.sum() / static_cast<double>(n);
  return s;
}

}  // namespace

TEST_CASE("sample_autocov on (1,-1,1,-1)") {
  const std::vector<double> v{1.0, -1.0, 1.0, -1.0};
  const AutocovSeq a = sample_autocov(v, 3);
  CHECK(a.gamma[0] == doctest::Approx(1.0));
  CHECK(a.gamma[1] == doctest::Approx(-0.75));
  CHECK(a.gamma[2] == doctest::Approx(0.5));
  CHECK(a.gamma[3] == doctest::Approx(-0.25));
}

TEST_CASE("sample_autocov trivial cases") {
  const AutocovSeq zeros = sample_autocov(std::vector<double>{0.0, 0.0, 0.0}, 2);
  for (double g : zeros.gamma) CHECK(g == 0.0);

  const AutocovSeq single = sample_autocov(std::vector<double>{2.0}, 0);
  CHECK(single.gamma[0] == doctest::Approx(4.0));

  CHECK_THROWS_AS(sample_autocov(std::vector<double>{}, 0), Error);
  CHECK_THROWS_AS(sample_autocov(std::vector<double>{1.0}, 1), Error);
}

TEST_CASE("autocovariances never exceed gamma(0) in magnitude") {
  auto rng = make_rng(21);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<std::size_t> len(2, 64);
    std::vector<double> v(len(rng));
    for (auto& x : v) x = normal(rng);
    const AutocovSeq a = sample_autocov(v, v.size() - 1);
    for (std::size_t h = 1; h < a.gamma.size(); ++h)
      CHECK(std::abs(a.gamma[h]) <= a.gamma[0]);
  }
}

TEST_CASE("trapezoid kernel weight") {
  const KernelSpec k = KernelSpec::trapezoid();
  CHECK(kernel_weight(0.5, k) == 1.0);
  CHECK(kernel_weight(1.5, k) == 0.5);
  CHECK(kernel_weight(-2.5, k) == 0.0);
  CHECK(kernel_weight(1.0, k) == 1.0);
  CHECK(kernel_weight(2.0, k) == doctest::Approx(0.0));
  for (double x = -3.0; x <= 3.0; x += 0.125) {
    CHECK(kernel_weight(x, k) == kernel_weight(-x, k));
    CHECK(kernel_weight(x, k) <= 1.0);
    CHECK(kernel_weight(x, k) >= 0.0);
  }
}

TEST_CASE("adaptive bandwidth returns 1 when correlations vanish beyond lag 1") {
  AutocovSeq a;
  a.n = 100;
  a.gamma = {1.0, 0.9};  // rho(h >= 2) treated as zero
  CHECK(select_bandwidth(a, BandwidthRule::adaptive()) == 1);
}

TEST_CASE("fixed bandwidth is ceil(n^exponent)") {
  AutocovSeq a;
  a.n = 100;
  a.gamma = {1.0};
  CHECK(select_bandwidth(a, BandwidthRule::fixed(0.25)) == 4);
}

TEST_CASE("adaptive bandwidth is capped at n/4") {
  AutocovSeq a;
  a.n = 100;
  a.gamma.assign(100, 0.99);
  a.gamma[0] = 1.0;  // every correlation is 0.99: nothing ever clears the bar
  CHECK(select_bandwidth(a, BandwidthRule::adaptive()) == 25);
}

TEST_CASE("adaptive bandwidth requires positive gamma(0) and n >= 8") {
  AutocovSeq a;
  a.n = 100;
  a.gamma = {0.0, 0.0};
  CHECK_THROWS_AS(select_bandwidth(a, BandwidthRule::adaptive()), Error);
  a.gamma = {1.0};
  a.n = 7;
  CHECK_THROWS_AS(select_bandwidth(a, BandwidthRule::adaptive()), Error);
}

TEST_CASE("adaptive bandwidth stays small on iid data") {
  // iid input has no population correlation at any lag
  std::size_t small = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(900 + static_cast<std::uint64_t>(t));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(2000);
    for (auto& x : v) x = normal(rng);
    const AutocovSeq a = sample_autocov(v, 40);
    if (select_bandwidth(a, BandwidthRule::adaptive()) <= 4) ++small;
  }
  CHECK(small >= static_cast<std::size_t>(0.95 * trials));
}

TEST_CASE("Kn policy is nondecreasing and o(log n) in the asymptotic range") {
  const BandwidthRule rule = BandwidthRule::adaptive();
  std::size_t prev = 0;
  for (std::size_t n : {8ul, 16ul, 100ul, 1000ul, 10000ul, 100000ul, 1000000ul}) {
    const std::size_t kn = rule.Kn(n);
    CHECK(kn >= prev);
    prev = kn;
    if (n >= 10000) {
      const double bound =
          std::ceil(std::log(static_cast<double>(n)) /
                    std::log(std::log(static_cast<double>(n))));
      CHECK(static_cast<double>(kn) <= bound);
    }
  }
}

TEST_CASE("build_sigma_hat identity case") {
  AutocovSeq a;
  a.n = 5;
  a.gamma = {1.0, 0.0, 0.0, 0.0, 0.0};
  const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());
  CHECK(s.floored_count == 0);
  CHECK(s.sigma_star_sq == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(s.matrix(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      CHECK(s.chol(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("build_sigma_hat tridiagonal case vs dense reference") {
  // gamma(0)=1.25, gamma(1)=-0.5, n=4, l=2: off-diagonal kappa(1/2)(-0.5)
  AutocovSeq a;
  a.n = 4;
  a.gamma = {1.25, -0.5, 0.0, 0.0};
  const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());
  // eigenvalues 1.25 - cos(k pi / 5), all above the floor 1.25/4
  CHECK(s.floored_count == 0);
  const auto ref = oracle::sigma_hat_reference(a.gamma, 4, 2);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK(std::abs(s.matrix(i, j) -
                     ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) <
            1e-10);
  CHECK(s.matrix(0, 1) == doctest::Approx(-0.5));
  CHECK(s.matrix(0, 0) == doctest::Approx(1.25));
}

TEST_CASE("build_sigma_hat floors an indefinite tapered matrix") {
  // 3x3 tridiagonal with entries -0.9: smallest eigenvalue 1 - 0.9 sqrt(2) < 0
  AutocovSeq a;
  a.n = 3;
  a.gamma = {1.0, -0.9};
  const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());
  CHECK(s.floored_count >= 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.matrix);
  CHECK(es.eigenvalues().minCoeff() >= 1.0 / 3.0 - 1e-10);
  const auto ref = oracle::sigma_hat_reference(a.gamma, 3, 2);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(std::abs(s.matrix(i, j) -
                     ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) <
            1e-10);
}

TEST_CASE("tapered matrix is banded and flooring is a small perturbation") {
  auto rng = make_rng(33);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> len(8, 24);
    std::uniform_int_distribution<std::size_t> bw(1, 3);
    std::vector<double> v(len(rng));
    for (auto& x : v) x = normal(rng);
    const AutocovSeq a = sample_autocov(v, v.size() - 1);
    if (!(a.gamma[0] > 0.0)) continue;
    const std::size_t l = bw(rng);
    const Eigen::MatrixXd tap = tapered_matrix(a, l, KernelSpec::trapezoid());
    for (Eigen::Index i = 0; i < tap.rows(); ++i)
      for (Eigen::Index j = 0; j < tap.cols(); ++j)
        if (static_cast<std::size_t>(std::abs(i - j)) > 2 * l)
          CHECK(tap(i, j) == 0.0);
    const SigmaHat s = build_sigma_hat(a, l, KernelSpec::trapezoid());
    CHECK((s.matrix - tap).norm() <= a.gamma[0] + 1e-12);
  }
}

TEST_CASE("build_sigma_hat equals the dense reference pipeline for n <= 8") {
  auto rng = make_rng(34);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<std::size_t> len(3, 8);
    std::uniform_int_distribution<std::size_t> bw(1, 4);
    std::vector<double> v(len(rng));
    for (auto& x : v) x = normal(rng);
    const AutocovSeq a = sample_autocov(v, v.size() - 1);
    if (!(a.gamma[0] > 0.0)) continue;
    const std::size_t l = bw(rng);
    const SigmaHat s = build_sigma_hat(a, l, KernelSpec::trapezoid());
    const auto ref = oracle::sigma_hat_reference(a.gamma, a.n, l);
    double err = 0.0;
    for (Eigen::Index i = 0; i < s.matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < s.matrix.cols(); ++j) {
        const double d =
            s.matrix(i, j) -
            ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        err += d * d;
      }
    CHECK(std::sqrt(err) <= 1e-10);
  }
}

TEST_CASE("whiten and color on a hand-built factor") {
  const SigmaHat s = sigma_from_lll({{2.0, 0.0}, {1.0, 1.0}});
  const auto eps = whiten(s, std::vector<double>{2.0, 3.0});
  CHECK(eps[0] == doctest::Approx(1.0));
  CHECK(eps[1] == doctest::Approx(2.0));
  const auto back = color(s, std::vector<double>{1.0, 2.0});
  CHECK(back[0] == doctest::Approx(2.0));
  CHECK(back[1] == doctest::Approx(3.0));
}

TEST_CASE("whiten/color with the identity matrix is the identity") {
  const SigmaHat s = SigmaHat::identity(4);
  const std::vector<double> v{1.0, -2.0, 0.5, 3.0};
  CHECK(whiten(s, v) == v);
  CHECK(color(s, v) == v);
}

TEST_CASE("whiten/color round trip") {
  auto rng = make_rng(35);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> resid(20);
    for (auto& x : resid) x = normal(rng);
    const AutocovSeq a = sample_autocov(resid, resid.size() - 1);
    const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());
    std::vector<double> v(20);
    for (auto& x : v) x = normal(rng);
    const auto round = color(s, whiten(s, v));
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(round[i] == doctest::Approx(v[i]).epsilon(1e-10));
  }
}

TEST_CASE("colored draws reproduce Sigma-hat in sample covariance") {
  auto rng = make_rng(36);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = 6;
  std::vector<double> resid(50);
  for (auto& x : resid) x = normal(rng);
  AutocovSeq a = sample_autocov(resid, resid.size() - 1);
  a.gamma.resize(n);
  a.n = n;
  const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());

  const std::size_t draws = 20000;
  Eigen::MatrixXd acc =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t d = 0; d < draws; ++d) {
    std::vector<double> eps(n);
    for (auto& e : eps) e = normal(rng);
    const auto x = color(s, eps);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        acc(i, j) += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
  }
  acc /= static_cast<double>(draws);
  const double tol = 5.0 * std::sqrt(2.0) * s.matrix.trace() /
                     std::sqrt(static_cast<double>(draws));
  CHECK((acc - s.matrix).norm() <= tol);
}

TEST_CASE("sigma_star_sq identity and resampling moments") {
  auto rng = make_rng(37);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = 30;
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i)
    resid[i] = normal(rng) + (i > 0 ? 0.4 * resid[i - 1] : 0.0);
  const AutocovSeq a = sample_autocov(resid, n - 1);
  const SigmaHat s = build_sigma_hat(a, 2, KernelSpec::trapezoid());

  // exact: sigma*^2 = n^{-1} * sum of all entries
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < s.matrix.cols(); ++j) total += s.matrix(i, j);
  CHECK(s.sigma_star_sq ==
        doctest::Approx(total / static_cast<double>(n)).epsilon(1e-12));

  // resampling pool with conditional mean 0 and variance 1
  std::vector<double> pool(n);
  for (auto& x : pool) x = normal(rng);
  const StandardizedVector eps = standardize(pool);

  const std::size_t m_draws = 10000;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> sums(m_draws);
  double mean_sq = 0.0;
  for (std::size_t d = 0; d < m_draws; ++d) {
    std::vector<double> estar(n);
    for (auto& e : estar) e = eps.values[pick(rng)];
    const auto v = color(s, estar);
    double sum = 0.0, sq = 0.0;
    for (double x : v) {
      sum += x;
      sq += x * x;
    }
    sums[d] = sum / std::sqrt(static_cast<double>(n));
    mean_sq += sq / static_cast<double>(n);
  }
  mean_sq /= static_cast<double>(m_draws);

  double mean_sum = 0.0;
  for (double x : sums) mean_sum += x;
  mean_sum /= static_cast<double>(m_draws);
  double var_sum = 0.0;
  for (double x : sums) var_sum += (x - mean_sum) * (x - mean_sum);
  var_sum /= static_cast<double>(m_draws);

  // Var*(n^{-1/2} sum V*) equals sigma*^2 up to 5 M^{-1/2} sigma*^2
  CHECK(std::abs(var_sum - s.sigma_star_sq) <=
        5.0 * s.sigma_star_sq / std::sqrt(static_cast<double>(m_draws)));

  // E*(n^{-1} sum V*^2) equals n^{-1} tr(Sigma-hat)
  const double trace_target = s.matrix.trace() / static_cast<double>(n);
  CHECK(mean_sq == doctest::Approx(trace_target).epsilon(0.05));
}
