#include "urtest/dgp.hpp"

#include <cmath>

namespace urtest {

const char* noise_name(NoiseKind k) noexcept {
  switch (k) {
    case NoiseKind::iid: return "iid";
    case NoiseKind::ma_pos: return "ma_pos";
    case NoiseKind::ma_neg: return "ma_neg";
    case NoiseKind::ar_pos: return "ar_pos";
    case NoiseKind::ar_neg: return "ar_neg";
    case NoiseKind::arch: return "arch";
  }
  return "unknown";
}

std::optional<NoiseKind> noise_from_name(std::string_view name) noexcept {
  if (name == "iid") return NoiseKind::iid;
  if (name == "ma_pos") return NoiseKind::ma_pos;
  if (name == "ma_neg") return NoiseKind::ma_neg;
  if (name == "ar_pos") return NoiseKind::ar_pos;
  if (name == "ar_neg") return NoiseKind::ar_neg;
  if (name == "arch") return NoiseKind::arch;
  return std::nullopt;
}

std::vector<double> noise_from_innovations(NoiseKind kind,
                                           std::span<const double> eps) {
  if (eps.empty()) fail(errc::empty_input, "noise_from_innovations: no innovations");
  switch (kind) {
    case NoiseKind::iid:
      return {eps.begin(), eps.end()};
    case NoiseKind::ma_pos:
    case NoiseKind::ma_neg: {
      if (eps.size() < 2)
        fail(errc::insufficient_data,
             "noise_from_innovations: MA needs the pre-sample innovation");
      const double theta = kind == NoiseKind::ma_pos ? 0.5 : -0.5;
      std::vector<double> v(eps.size() - 1);
      for (std::size_t t = 1; t < eps.size(); ++t)
        v[t - 1] = eps[t] + theta * eps[t - 1];
      return v;
    }
    case NoiseKind::ar_pos:
    case NoiseKind::ar_neg: {
      const double a = kind == NoiseKind::ar_pos ? 0.5 : -0.5;
      std::vector<double> v(eps.size());
      double prev = 0.0;
      for (std::size_t t = 0; t < eps.size(); ++t) {
        prev = eps[t] + a * prev;
        v[t] = prev;
      }
      return v;
    }
    case NoiseKind::arch: {
      std::vector<double> v(eps.size());
      double prev = 0.0;
      for (std::size_t t = 0; t < eps.size(); ++t) {
        prev = std::sqrt(1e-6 + 0.25 * prev * prev) * eps[t];
        v[t] = prev;
      }
      return v;
    }
  }
  fail(errc::invalid_argument, "noise_from_innovations: unknown kind");
}

std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n,
                              std::size_t burn_in, std::mt19937_64& rng) {
  if (n < 1) fail(errc::invalid_argument, "gen_noise: n must be >= 1");
  const bool ma =
      spec.kind == NoiseKind::ma_pos || spec.kind == NoiseKind::ma_neg;
  const std::size_t draws = n + burn_in + (ma ? 1 : 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> eps(draws);
  for (auto& e : eps) e = normal(rng);
  std::vector<double> v = noise_from_innovations(spec.kind, eps);
  return {v.begin() + static_cast<std::ptrdiff_t>(burn_in), v.end()};
}

Series gen_series(const DgpSpec& spec, std::mt19937_64& rng) {
  if (spec.n < 2) fail(errc::invalid_argument, "gen_series: n must be >= 2");
  if (spec.varphi > 0.0)
    fail(errc::invalid_argument, "gen_series: varphi must be <= 0");

  if (spec.varphi == 0.0) {
    // Unit-root null: X_0 = 0 exactly, pure cumulation of the noise.
    const std::vector<double> v = gen_noise(spec.noise, spec.n, spec.burn_in, rng);
    std::vector<double> x(spec.n);
    double acc = 0.0;
    for (std::size_t t = 0; t < spec.n; ++t) {
      acc += v[t];
      x[t] = acc;
    }
    return Series(std::move(x));
  }

  // Stationary alternative: spin the recursion up from zero over burn_in
  // extra steps and keep the tail.
  const std::size_t total = spec.n + spec.burn_in;
  const std::vector<double> v = gen_noise(spec.noise, total, spec.burn_in, rng);
  const double coef = 1.0 + spec.varphi;
  std::vector<double> x(spec.n);
  double prev = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    prev = coef * prev + v[t];
    if (t >= spec.burn_in) x[t - spec.burn_in] = prev;
  }
  return Series(std::move(x));
}

}  // namespace urtest
