// urtest command-line frontend. Talks to the library exclusively through the
// public C API in urtest.h.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urtest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;   // malformed file or config
constexpr int kExitDegenerate = 3; // series unusable for testing
constexpr int kMinObservations = 16;

// One ASCII real per line; '#' starts a comment; blank lines are skipped.
// Returns false and reports the offending 1-based line number on junk.
bool read_series_file(const std::string& path, std::vector<double>& out,
                      std::string& error) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    error = "cannot open input file '" + path + "'";
    return false;
  }
  out.clear();
  std::string line;
  int c;
  std::size_t lineno = 1;
  auto flush_line = [&]() -> bool {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i == line.size() || line[i] == '#') return true;
    char* end = nullptr;
    const double value = std::strtod(line.c_str() + i, &end);
    std::size_t j = end - line.c_str();
    while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (end == line.c_str() + i || j != line.size()) {
      error = "line " + std::to_string(lineno) + ": not a number: '" +
              line.substr(i) + "'";
      return false;
    }
    out.push_back(value);
    return true;
  };
  bool ok = true;
  while ((c = std::fgetc(f)) != EOF) {
    if (c == '\n') {
      if (!flush_line()) {
        ok = false;
        break;
      }
      line.clear();
      ++lineno;
    } else if (c != '\r') {
      line.push_back(static_cast<char>(c));
    }
  }
  if (ok && !line.empty()) ok = flush_line();
  std::fclose(f);
  return ok;
}

bool parse_bandwidth(const std::string& spec, urtest_test_options& opt,
                     std::string& error) {
  if (spec == "adaptive") {
    opt.bandwidth_fixed = 0;
    return true;
  }
  if (spec.rfind("fixed:", 0) == 0) {
    char* end = nullptr;
    const double exp = std::strtod(spec.c_str() + 6, &end);
    if (end == spec.c_str() + 6 || *end != '\0' || !(exp > 0.0 && exp < 1.0)) {
      error = "bad bandwidth exponent in '" + spec + "'";
      return false;
    }
    opt.bandwidth_fixed = 1;
    opt.bandwidth_exponent = exp;
    return true;
  }
  error = "bandwidth must be 'adaptive' or 'fixed:<exponent>', got '" + spec + "'";
  return false;
}

int cmd_test(const std::string& input, const std::string& method_name,
             int B, double size, const std::string& bandwidth,
             std::uint64_t seed) {
  const int method = urtest_method_from_name(method_name.c_str());
  if (method < 0) {
    std::fprintf(stderr, "error: unknown method '%s'\n", method_name.c_str());
    return kExitBadInput;
  }

  std::vector<double> y;
  std::string error;
  if (!read_series_file(input, y, error)) {
    std::fprintf(stderr, "error: %s\n", error.c_str());
    return kExitBadInput;
  }
  if (y.size() < kMinObservations) {
    std::fprintf(stderr, "error: need at least %d observations, got %zu\n",
                 kMinObservations, y.size());
    return kExitDegenerate;
  }

  urtest_test_options opt;
  urtest_test_options_init(&opt);
  opt.seed = seed;
  opt.bootstrap_reps = B;
  opt.size = size;
  opt.cache_dir = std::getenv("URTEST_CACHE_DIR");
  if (!parse_bandwidth(bandwidth, opt, error)) {
    std::fprintf(stderr, "error: %s\n", error.c_str());
    return kExitBadInput;
  }

  urtest_result* result = nullptr;
  const urtest_status status = urtest_run_test(
      static_cast<urtest_method>(method), y.data(), y.size(), &opt, &result);
  if (status != URTEST_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", urtest_last_error(),
                 urtest_status_name(status));
    return status == URTEST_ERR_DEGENERATE || status == URTEST_ERR_NUMERIC
               ? kExitDegenerate
               : kExitBadInput;
  }

  std::printf("method      %s\n", urtest_result_method(result));
  std::printf("n           %zu\n", y.size());
  std::printf("statistic   %.6f\n", urtest_result_statistic(result));
  if (urtest_result_has_pvalue(result))
    std::printf("p-value     %.6f\n", urtest_result_pvalue(result));
  double cv = 0.0;
  if (urtest_result_nuisance(result, "cv", &cv))
    std::printf("critical    %.6f\n", cv);
  std::printf("decision    %s\n", urtest_result_reject(result)
                                      ? "reject unit root"
                                      : "fail to reject unit root");
  const size_t count = urtest_result_nuisance_count(result);
  for (size_t i = 0; i < count; ++i) {
    const char* name = urtest_result_nuisance_name(result, i);
    if (std::string(name) == "cv") continue;
    std::printf("  %-14s %.6g\n", name, urtest_result_nuisance_value(result, i));
  }
  std::printf("REJECT=%d\n", urtest_result_reject(result));
  urtest_result_free(result);
  return kExitOk;
}

int cmd_simulate(const std::string& config, const std::string& out_stem,
                 int parallelism) {
  urtest_mc_table* table = nullptr;
  const urtest_status status = urtest_mc_run_file(config.c_str(), parallelism,
                                                  &table);
  if (status != URTEST_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", urtest_last_error(),
                 urtest_status_name(status));
    return kExitBadInput;
  }

  const size_t cells = urtest_mc_cell_count(table);
  const size_t failures = urtest_mc_error_count(table);
  std::fprintf(stderr,
               "study: %zu cells (reps=%ld, B=%ld, n=%ld, master_seed=%llu)\n",
               cells + failures, urtest_mc_reps(table),
               urtest_mc_bootstrap_reps(table), urtest_mc_sample_length(table),
               static_cast<unsigned long long>(urtest_mc_master_seed(table)));
  for (size_t i = 0; i < failures; ++i)
    std::fprintf(stderr, "cell failed: %s\n", urtest_mc_error(table, i));

  const urtest_status wstatus = urtest_mc_write(table, out_stem.c_str());
  urtest_mc_table_free(table);
  if (wstatus != URTEST_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", urtest_last_error(),
                 urtest_status_name(wstatus));
    return kExitBadInput;
  }
  std::printf("wrote %s.csv and %s.grid.txt (%zu cells)\n", out_stem.c_str(),
              out_stem.c_str(), cells);
  return failures == 0 ? kExitOk : kExitBadInput;
}

int cmd_critvals(long n, long paths, std::uint64_t seed,
                 const std::vector<double>& sizes, const std::string& out) {
  if (paths < 10000) {
    std::fprintf(stderr, "error: --paths must be at least 10000, got %ld\n",
                 paths);
    return kExitBadInput;
  }
  const urtest_status status = urtest_df_critical_values_write(
      out.c_str(), n, paths, seed, sizes.data(), sizes.size());
  if (status != URTEST_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", urtest_last_error(),
                 urtest_status_name(status));
    return kExitBadInput;
  }
  std::printf("wrote %s (n=%ld, paths=%ld, seed=%llu)\n", out.c_str(), n, paths,
              static_cast<unsigned long long>(seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urtest — unit-root tests and Monte Carlo size/power studies"};
  app.require_subcommand(1);

  // test
  std::string input;
  std::string method = "lpb-pp";
  int B = 500;
  double size = 0.05;
  std::string bandwidth = "adaptive";
  std::uint64_t seed = 12345;
  auto* test = app.add_subcommand("test", "run a unit-root test on a series file");
  test->add_option("input", input, "input file, one real per line ('#' comments)")
      ->required();
  test->add_option("--method", method,
                   "test: adf, arb-adf, fpp, lpb-pp or cbb-pp")
      ->capture_default_str();
  test->add_option("--B", B, "bootstrap replicates")->capture_default_str();
  test->add_option("--size", size, "nominal test size")->capture_default_str();
  test->add_option("--bandwidth", bandwidth, "adaptive or fixed:<exponent>")
      ->capture_default_str();
  test->add_option("--seed", seed, "bootstrap seed")->capture_default_str();

  // simulate
  std::string config;
  std::string out_stem = "mc_table";
  int parallelism = 0;
  auto* simulate =
      app.add_subcommand("simulate", "run a Monte Carlo size/power study");
  simulate->add_option("--config", config, "study config file")->required();
  simulate->add_option("--out", out_stem, "output stem for .csv and .grid.txt")
      ->capture_default_str();
  simulate
      ->add_option("--parallelism", parallelism,
                   "worker threads (0 keeps the config value)")
      ->capture_default_str();

  // critvals
  long cv_n = 100;
  long cv_paths = 100000;
  std::uint64_t cv_seed = 12345;
  std::vector<double> cv_sizes{0.01, 0.05, 0.10};
  std::string cv_out = "dfcv.csv";
  auto* critvals = app.add_subcommand(
      "critvals", "simulate Dickey-Fuller critical values into a cache file");
  critvals->add_option("--n", cv_n, "sample length")->capture_default_str();
  critvals->add_option("--paths", cv_paths, "simulated paths (>= 10000)")
      ->capture_default_str();
  critvals->add_option("--seed", cv_seed, "simulation seed")
      ->capture_default_str();
  critvals->add_option("--sizes", cv_sizes, "test sizes")->capture_default_str();
  critvals->add_option("--out", cv_out, "output file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (test->parsed()) return cmd_test(input, method, B, size, bandwidth, seed);
  if (simulate->parsed()) return cmd_simulate(config, out_stem, parallelism);
  if (critvals->parsed())
    return cmd_critvals(cv_n, cv_paths, cv_seed, cv_sizes, cv_out);
  return kExitOk;
}
