#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "urtest.h"

namespace {

// Deterministic non-degenerate pseudo-walk for exercising the API surface.
std::vector<double> demo_series(std::size_t n) {
  std::vector<double> y(n);
  std::uint64_t state = 0x2545F4914F6CDD1DULL;
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    acc += u - 0.5 + 0.1 * std::sin(static_cast<double>(t));
    y[t] = acc;
  }
  return y;
}

}  // namespace

TEST_CASE("options init fills the documented defaults") {
  urtest_test_options opt;
  urtest_test_options_init(&opt);
  CHECK(opt.seed == 12345);
  CHECK(opt.bootstrap_reps == 500);
  CHECK(opt.size == 0.05);
  CHECK(opt.bandwidth_fixed == 0);
  CHECK(opt.bandwidth_c == 2.0);
  CHECK(opt.cv_paths == 100000);
  CHECK(opt.cache_dir == nullptr);
}

TEST_CASE("method names round-trip") {
  for (int m = 0; m <= 4; ++m) {
    const char* name = urtest_method_name(static_cast<urtest_method>(m));
    CHECK(urtest_method_from_name(name) == m);
  }
  CHECK(urtest_method_from_name("nope") == -1);
  CHECK(urtest_method_from_name(nullptr) == -1);
}

TEST_CASE("lpb-pp through the C API is deterministic") {
  const auto y = demo_series(100);
  urtest_test_options opt;
  urtest_test_options_init(&opt);
  opt.bootstrap_reps = 80;
  opt.seed = 2024;

  urtest_result* a = nullptr;
  urtest_result* b = nullptr;
  REQUIRE(urtest_run_test(URTEST_METHOD_LPB_PP, y.data(), y.size(), &opt, &a) ==
          URTEST_OK);
  REQUIRE(urtest_run_test(URTEST_METHOD_LPB_PP, y.data(), y.size(), &opt, &b) ==
          URTEST_OK);
  CHECK(urtest_result_statistic(a) == urtest_result_statistic(b));
  REQUIRE(urtest_result_has_pvalue(a));
  CHECK(urtest_result_pvalue(a) == urtest_result_pvalue(b));
  CHECK(urtest_result_reject(a) == urtest_result_reject(b));
  CHECK(std::string(urtest_result_method(a)) == "lpb-pp");

  double l = 0.0;
  CHECK(urtest_result_nuisance(a, "l", &l));
  CHECK(l >= 1.0);
  double missing = 0.0;
  CHECK(!urtest_result_nuisance(a, "no_such_key", &missing));

  const size_t count = urtest_result_nuisance_count(a);
  CHECK(count >= 4);
  for (size_t i = 1; i < count; ++i)  // sorted by name
    CHECK(std::string(urtest_result_nuisance_name(a, i - 1)) <
          std::string(urtest_result_nuisance_name(a, i)));

  urtest_result_free(a);
  urtest_result_free(b);
}

TEST_CASE("every method runs through the C API") {
  const auto y = demo_series(100);
  urtest_test_options opt;
  urtest_test_options_init(&opt);
  opt.bootstrap_reps = 30;
  opt.cv_paths = 20000;
  for (int m = 0; m <= 4; ++m) {
    urtest_result* r = nullptr;
    REQUIRE(urtest_run_test(static_cast<urtest_method>(m), y.data(), y.size(),
                            &opt, &r) == URTEST_OK);
    const bool bootstrap = m == URTEST_METHOD_ARB_ADF ||
                           m == URTEST_METHOD_LPB_PP ||
                           m == URTEST_METHOD_CBB_PP;
    CHECK(urtest_result_has_pvalue(r) == (bootstrap ? 1 : 0));
    if (!bootstrap) {
      double cv = 0.0;
      CHECK(urtest_result_nuisance(r, "cv", &cv));
      CHECK(cv < 0.0);
    }
    urtest_result_free(r);
  }
}

TEST_CASE("error paths set status and message") {
  const auto y = demo_series(10);
  urtest_result* r = nullptr;
  CHECK(urtest_run_test(URTEST_METHOD_LPB_PP, y.data(), y.size(), nullptr, &r) ==
        URTEST_ERR_DEGENERATE);
  CHECK(std::string(urtest_last_error()).find("16") != std::string::npos);

  CHECK(urtest_run_test(URTEST_METHOD_LPB_PP, nullptr, 100, nullptr, &r) ==
        URTEST_ERR_INVALID);

  // constant series: exact AR fit
  const std::vector<double> flat(50, 2.5);
  CHECK(urtest_run_test(URTEST_METHOD_LPB_PP, flat.data(), flat.size(), nullptr,
                        &r) == URTEST_ERR_DEGENERATE);
  CHECK(std::string(urtest_last_error()).size() > 0);

  urtest_test_options opt;
  urtest_test_options_init(&opt);
  opt.size = 1.5;
  const auto ok = demo_series(100);
  CHECK(urtest_run_test(URTEST_METHOD_LPB_PP, ok.data(), ok.size(), &opt, &r) ==
        URTEST_ERR_INVALID);
}

TEST_CASE("mc study through the C API") {
  const std::string cfg_path = "capi_mc_test.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "tests = lpb-pp\n"
           "noises = iid\n"
           "varphis = 0,-0.10\n"
           "n = 50\n"
           "reps = 5\n"
           "B = 15\n"
           "size = 0.05\n"
           "master_seed = 7\n"
           "parallelism = 2\n";
  }
  urtest_mc_table* table = nullptr;
  REQUIRE(urtest_mc_run_file(cfg_path.c_str(), 0, &table) == URTEST_OK);
  CHECK(urtest_mc_cell_count(table) == 2);
  CHECK(urtest_mc_error_count(table) == 0);
  CHECK(urtest_mc_reps(table) == 5);
  CHECK(urtest_mc_bootstrap_reps(table) == 15);
  CHECK(urtest_mc_sample_length(table) == 50);
  CHECK(urtest_mc_master_seed(table) == 7);

  const char* method = nullptr;
  const char* noise = nullptr;
  double varphi = 1.0, rate = -1.0;
  long reps = 0;
  REQUIRE(urtest_mc_cell(table, 0, &method, &noise, &varphi, &rate, &reps) ==
          URTEST_OK);
  CHECK(std::string(method) == "lpb-pp");
  CHECK(std::string(noise) == "iid");
  CHECK(varphi == 0.0);
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);
  CHECK(reps == 5);
  CHECK(urtest_mc_cell(table, 99, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        URTEST_ERR_INVALID);

  REQUIRE(urtest_mc_write(table, "capi_mc_out") == URTEST_OK);
  CHECK(std::filesystem::exists("capi_mc_out.csv"));
  CHECK(std::filesystem::exists("capi_mc_out.grid.txt"));
  urtest_mc_table_free(table);

  std::filesystem::remove(cfg_path);
  std::filesystem::remove("capi_mc_out.csv");
  std::filesystem::remove("capi_mc_out.grid.txt");
}

TEST_CASE("mc config errors are reported as parse failures naming the key") {
  const std::string cfg_path = "capi_bad_test.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "tests = adf\nnoises = iid\nvarphis = 0\nwibble = 3\n";
  }
  urtest_mc_table* table = nullptr;
  CHECK(urtest_mc_run_file(cfg_path.c_str(), 0, &table) == URTEST_ERR_PARSE);
  CHECK(std::string(urtest_last_error()).find("wibble") != std::string::npos);
  CHECK(urtest_mc_run_file("no_such_file.cfg", 0, &table) == URTEST_ERR_IO);
  std::filesystem::remove(cfg_path);
}

TEST_CASE("df critical values through the C API") {
  const double sizes[] = {0.01, 0.05, 0.10};
  double q[3] = {0, 0, 0};
  REQUIRE(urtest_df_critical_values(100, 20000, 5, sizes, 3, q) == URTEST_OK);
  CHECK(q[0] < q[1]);
  CHECK(q[1] < q[2]);
  CHECK(q[1] == doctest::Approx(-1.95).epsilon(0.05));

  CHECK(urtest_df_critical_values(100, 10, 5, sizes, 3, q) == URTEST_ERR_INVALID);

  REQUIRE(urtest_df_critical_values_write("capi_cv_test.csv", 100, 20000, 5,
                                          sizes, 3) == URTEST_OK);
  std::ifstream in("capi_cv_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "# n=100 paths=20000 seed=5");
  std::filesystem::remove("capi_cv_test.csv");
}
