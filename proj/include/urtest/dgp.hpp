#pragma once

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "urtest/series.hpp"

namespace urtest {

// The six noise recursions of the simulation study, all driven by iid
// standard normal innovations:
//   iid     V_t = e_t
//   ma_pos  V_t = e_t + 0.5 e_{t-1}
//   ma_neg  V_t = e_t - 0.5 e_{t-1}
//   ar_pos  V_t = e_t + 0.5 V_{t-1}
//   ar_neg  V_t = e_t - 0.5 V_{t-1}
//   arch    V_t = s_t e_t,  s_t^2 = 1e-6 + 0.25 V_{t-1}^2
enum class NoiseKind { iid, ma_pos, ma_neg, ar_pos, ar_neg, arch };

const char* noise_name(NoiseKind k) noexcept;
std::optional<NoiseKind> noise_from_name(std::string_view name) noexcept;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::iid;
};

// X_t = (1 + varphi) X_{t-1} + V_t. varphi = 0 is the unit-root null started
// exactly at X_0 = 0; varphi < 0 is the stationary alternative approximated
// by a burned-in start.
struct DgpSpec {
  NoiseSpec noise;
  double varphi = 0.0;
  std::size_t n = 100;
  std::size_t burn_in = 200;
};

// Applies the noise recursion to explicit innovations. Recursive kinds start
// from V_0 = 0; for MA kinds eps[0] is the pre-sample innovation and the
// output is one shorter than eps.
std::vector<double> noise_from_innovations(NoiseKind kind,
                                           std::span<const double> eps);

// Draws the required innovations, applies the recursion, discards the first
// burn_in values, returns exactly n.
std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n,
                              std::size_t burn_in, std::mt19937_64& rng);

Series gen_series(const DgpSpec& spec, std::mt19937_64& rng);

}  // namespace urtest
