#include "urtest.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "urtest/baselines.hpp"
#include "urtest/lpb.hpp"
#include "urtest/mc.hpp"

namespace {

thread_local std::string g_last_error;

urtest_status status_of(urtest::errc code) {
  using urtest::errc;
  switch (code) {
    case errc::degenerate_regressor:
    case errc::zero_residual_variance:
    case errc::zero_variance:
    case errc::insufficient_data:
      return URTEST_ERR_DEGENERATE;
    case errc::eigen_failure:
    case errc::singular_factor:
    case errc::nonpositive_lrv:
    case errc::replicate_failure:
      return URTEST_ERR_NUMERIC;
    case errc::parse_error:
      return URTEST_ERR_PARSE;
    case errc::io_error:
      return URTEST_ERR_IO;
    default:
      return URTEST_ERR_INVALID;
  }
}

template <typename Fn>
urtest_status guarded(Fn&& fn) {
  try {
    fn();
    return URTEST_OK;
  } catch (const urtest::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return URTEST_ERR_INVALID;
  } catch (...) {
    g_last_error = "unknown failure";
    return URTEST_ERR_INVALID;
  }
}

urtest_status invalid(const char* message) {
  g_last_error = message;
  return URTEST_ERR_INVALID;
}

}  // namespace

struct urtest_result {
  urtest::TestResult result;
  std::vector<std::pair<std::string, double>> nuisance;  // sorted by name
};

struct urtest_mc_table {
  urtest::McTable table;
};

extern "C" {

const char* urtest_status_name(urtest_status status) {
  switch (status) {
    case URTEST_OK: return "ok";
    case URTEST_ERR_INVALID: return "invalid argument";
    case URTEST_ERR_DEGENERATE: return "degenerate input";
    case URTEST_ERR_NUMERIC: return "numerical failure";
    case URTEST_ERR_PARSE: return "parse error";
    case URTEST_ERR_IO: return "io error";
  }
  return "unknown";
}

const char* urtest_last_error(void) { return g_last_error.c_str(); }

const char* urtest_version(void) { return "1.0.0"; }

int urtest_method_from_name(const char* name) {
  if (!name) return -1;
  const auto m = urtest::method_from_name(name);
  return m ? static_cast<int>(*m) : -1;
}

const char* urtest_method_name(urtest_method method) {
  return urtest::method_name(static_cast<urtest::Method>(method));
}

void urtest_test_options_init(urtest_test_options* options) {
  if (!options) return;
  options->seed = 12345;
  options->bootstrap_reps = 500;
  options->size = 0.05;
  options->bandwidth_fixed = 0;
  options->bandwidth_exponent = 0.25;
  options->bandwidth_c = 2.0;
  options->cv_paths = 100000;
  options->cv_seed = 12345;
  options->cache_dir = nullptr;
}

urtest_status urtest_run_test(urtest_method method, const double* y,
                              size_t n_obs, const urtest_test_options* options,
                              urtest_result** out) {
  if (!y || !out) return invalid("null pointer argument");
  if (n_obs < 16) {
    g_last_error = "need at least 16 observations";
    return URTEST_ERR_DEGENERATE;
  }

  urtest_test_options defaults;
  urtest_test_options_init(&defaults);
  const urtest_test_options& opt = options ? *options : defaults;
  if (opt.bootstrap_reps < 1) return invalid("bootstrap_reps must be >= 1");
  if (!(opt.size > 0.0 && opt.size < 1.0)) return invalid("size must be in (0,1)");

  return guarded([&]() {
    using namespace urtest;
    const Series series(std::vector<double>(y, y + n_obs));
    const BandwidthRule rule = opt.bandwidth_fixed
                                   ? BandwidthRule::fixed(opt.bandwidth_exponent)
                                   : BandwidthRule::adaptive(opt.bandwidth_c);
    const std::string cache = opt.cache_dir ? opt.cache_dir : "";
    const auto B = static_cast<std::size_t>(opt.bootstrap_reps);

    TestResult result;
    switch (static_cast<Method>(method)) {
      case Method::adf: {
        const double sizes[] = {opt.size};
        const auto& cv =
            cv_table_cached(n_obs, static_cast<std::size_t>(opt.cv_paths),
                            opt.cv_seed, sizes, cache);
        result = adf_test(series, default_k_max(n_obs), opt.size, cv);
        break;
      }
      case Method::arb_adf:
        result = arb_adf_test(series, B, opt.size, default_k_max(n_obs), opt.seed);
        break;
      case Method::fpp: {
        const double sizes[] = {opt.size};
        const auto& cv =
            cv_table_cached(n_obs, static_cast<std::size_t>(opt.cv_paths),
                            opt.cv_seed, sizes, cache);
        result = fpp_test(series, opt.size, rule, cv);
        break;
      }
      case Method::lpb_pp:
        result = lpb_test(series, B, opt.size, rule, opt.seed);
        break;
      case Method::cbb_pp:
        result = cbb_pp_test(series, B, opt.size, opt.seed);
        break;
      default:
        fail(errc::invalid_argument, "unknown method");
    }

    auto handle = new urtest_result;
    handle->nuisance.assign(result.nuisance.begin(), result.nuisance.end());
    handle->result = std::move(result);
    *out = handle;
  });
}

void urtest_result_free(urtest_result* result) { delete result; }

const char* urtest_result_method(const urtest_result* result) {
  return urtest::method_name(result->result.method);
}

double urtest_result_statistic(const urtest_result* result) {
  return result->result.statistic;
}

int urtest_result_has_pvalue(const urtest_result* result) {
  return result->result.p_value.has_value() ? 1 : 0;
}

double urtest_result_pvalue(const urtest_result* result) {
  return result->result.p_value.value_or(0.0);
}

int urtest_result_reject(const urtest_result* result) {
  return result->result.reject ? 1 : 0;
}

size_t urtest_result_nuisance_count(const urtest_result* result) {
  return result->nuisance.size();
}

const char* urtest_result_nuisance_name(const urtest_result* result, size_t i) {
  return i < result->nuisance.size() ? result->nuisance[i].first.c_str() : "";
}

double urtest_result_nuisance_value(const urtest_result* result, size_t i) {
  return i < result->nuisance.size() ? result->nuisance[i].second : 0.0;
}

int urtest_result_nuisance(const urtest_result* result, const char* name,
                           double* value) {
  if (!name) return 0;
  for (const auto& [key, val] : result->nuisance) {
    if (key == name) {
      if (value) *value = val;
      return 1;
    }
  }
  return 0;
}

urtest_status urtest_mc_run_file(const char* config_path,
                                 int parallelism_override,
                                 urtest_mc_table** out) {
  if (!config_path || !out) return invalid("null pointer argument");
  return guarded([&]() {
    urtest::McConfig cfg = urtest::read_mc_config(config_path);
    if (parallelism_override > 0)
      cfg.parallelism = static_cast<unsigned>(parallelism_override);
    auto handle = new urtest_mc_table;
    handle->table = urtest::run_table(cfg);
    *out = handle;
  });
}

void urtest_mc_table_free(urtest_mc_table* table) { delete table; }

size_t urtest_mc_cell_count(const urtest_mc_table* table) {
  return table->table.cells.size();
}

urtest_status urtest_mc_cell(const urtest_mc_table* table, size_t i,
                             const char** method, const char** noise,
                             double* varphi, double* rate, long* reps) {
  if (i >= table->table.cells.size()) return invalid("cell index out of range");
  const auto& cell = table->table.cells[i];
  if (method) *method = urtest::method_name(cell.method);
  if (noise) *noise = urtest::noise_name(cell.noise);
  if (varphi) *varphi = cell.varphi;
  if (rate) *rate = cell.rate();
  if (reps) *reps = static_cast<long>(cell.reps);
  return URTEST_OK;
}

size_t urtest_mc_error_count(const urtest_mc_table* table) {
  return table->table.errors.size();
}

const char* urtest_mc_error(const urtest_mc_table* table, size_t i) {
  return i < table->table.errors.size() ? table->table.errors[i].c_str() : "";
}

long urtest_mc_reps(const urtest_mc_table* table) {
  return static_cast<long>(table->table.config.reps);
}

long urtest_mc_bootstrap_reps(const urtest_mc_table* table) {
  return static_cast<long>(table->table.config.B);
}

long urtest_mc_sample_length(const urtest_mc_table* table) {
  return static_cast<long>(table->table.config.n);
}

uint64_t urtest_mc_master_seed(const urtest_mc_table* table) {
  return table->table.config.master_seed;
}

urtest_status urtest_mc_write(const urtest_mc_table* table, const char* stem) {
  if (!stem) return invalid("null stem");
  return guarded([&]() { urtest::write_outputs(table->table, stem); });
}

urtest_status urtest_df_critical_values(long n_obs, long paths, uint64_t seed,
                                        const double* sizes, size_t n_sizes,
                                        double* out_quantiles) {
  if (!sizes || !out_quantiles || n_sizes == 0)
    return invalid("null or empty sizes");
  if (paths < 10000) return invalid("need at least 10000 paths");
  if (n_obs < 3) return invalid("n_obs must be >= 3");
  return guarded([&]() {
    const auto table = urtest::make_cv_table(
        static_cast<std::size_t>(n_obs), static_cast<std::size_t>(paths), seed,
        std::span<const double>(sizes, n_sizes));
    for (size_t i = 0; i < n_sizes; ++i)
      out_quantiles[i] = table.quantile(sizes[i]);
  });
}

urtest_status urtest_df_critical_values_write(const char* path, long n_obs,
                                              long paths, uint64_t seed,
                                              const double* sizes,
                                              size_t n_sizes) {
  if (!path || !sizes || n_sizes == 0) return invalid("null or empty argument");
  if (paths < 10000) return invalid("need at least 10000 paths");
  if (n_obs < 3) return invalid("n_obs must be >= 3");
  return guarded([&]() {
    const auto table = urtest::make_cv_table(
        static_cast<std::size_t>(n_obs), static_cast<std::size_t>(paths), seed,
        std::span<const double>(sizes, n_sizes));
    urtest::write_cv_table(table, path);
  });
}

}  // extern "C"
