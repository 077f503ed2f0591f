#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace urtest {

enum class Method { adf, arb_adf, fpp, lpb_pp, cbb_pp };

const char* method_name(Method m) noexcept;
std::optional<Method> method_from_name(std::string_view name) noexcept;

// Replicate pairs of a bootstrap test plus the one-sided p-values
// p = B^{-1} #{ i : observed > rep_i } (strict inequality).
struct BootstrapRun {
  std::vector<double> phi_reps;
  std::vector<double> t_reps;
  double phi_observed = 0.0;
  double t_observed = 0.0;
  double p_phi = 0.0;
  double p_t = 0.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

// Outcome of one unit-root test. Bootstrap tests reject iff p_value < size;
// critical-value tests reject iff statistic < the size-quantile (stored in
// nuisance under "cv"). The nuisance map carries per-method diagnostics such
// as bandwidth, lag order, block length, sigma*^2 or floored eigenvalue count.
struct TestResult {
  Method method = Method::adf;
  double statistic = 0.0;
  std::optional<double> p_value;
  bool reject = false;
  std::map<std::string, double> nuisance;
  std::optional<BootstrapRun> bootstrap;
};

}  // namespace urtest
