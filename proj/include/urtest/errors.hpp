#pragma once

#include <stdexcept>
#include <string>

namespace urtest {

// Failure categories. The C API maps these onto urtest_status values, so
// keep the list in sync with include/urtest.h.
enum class errc {
  invalid_argument = 1,
  empty_input,
  insufficient_data,
  degenerate_regressor,   // sum of squared lagged regressors is zero
  zero_residual_variance, // exact AR(1) fit, t-statistic undefined
  zero_variance,          // constant vector where spread is required
  eigen_failure,          // dense symmetric eigensolver did not converge
  singular_factor,        // nonpositive diagonal in a triangular factor
  nonpositive_lrv,        // long-run variance estimate <= 0
  replicate_failure,      // bootstrap replicate kept degenerating
  parse_error,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace urtest
