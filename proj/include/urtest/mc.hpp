#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "urtest/dgp.hpp"
#include "urtest/result.hpp"

namespace urtest {

// Study grid and protocol. Defaults reproduce the desk-scale protocol:
// samples of length 100, 600 repetitions per cell, 500 bootstrap replicates,
// nominal size 0.05.
struct McConfig {
  std::vector<Method> tests{Method::adf, Method::arb_adf, Method::fpp,
                            Method::lpb_pp, Method::cbb_pp};
  std::vector<NoiseKind> noises{NoiseKind::iid,    NoiseKind::ma_pos,
                                NoiseKind::ma_neg, NoiseKind::ar_pos,
                                NoiseKind::ar_neg, NoiseKind::arch};
  std::vector<double> varphis{0.0, -0.02, -0.04, -0.06, -0.08, -0.10};
  std::size_t n = 100;
  std::size_t reps = 600;
  std::size_t B = 500;
  double size = 0.05;
  std::uint64_t master_seed = 12345;
  unsigned parallelism = 1;

  // Not config-file keys: sampling/plumbing knobs with fixed defaults.
  bool common_series = true;  // same sample paths for every test in a cell
  std::size_t burn_in = 200;
  std::size_t cv_paths = 100000;  // DF critical-value simulation size
  std::uint64_t cv_seed = 12345;
  std::string cache_dir;  // critical-value cache location ("" = in-process only)
};

struct McCell {
  Method method = Method::adf;
  NoiseKind noise = NoiseKind::iid;
  double varphi = 0.0;
  std::size_t rejects = 0;
  std::size_t reps = 0;
  std::size_t failures = 0;
  std::uint64_t seed_root = 0;

  double rate() const {
    return reps == 0 ? 0.0
                     : static_cast<double>(rejects) / static_cast<double>(reps);
  }
};

struct McTable {
  McConfig config;
  std::vector<McCell> cells;
  std::vector<std::string> errors;  // aborted cells, partial-result report

  const McCell* find(Method m, NoiseKind k, double varphi) const;
};

// Flat key-value study config. Keys: tests, noises, varphis, n, reps, B,
// size, master_seed, parallelism. Lists are comma-separated; '#' starts a
// comment. Unknown keys and bad values raise parse_error naming the key.
McConfig parse_mc_config(const std::string& text);
McConfig read_mc_config(const std::string& path);

// Decides one replication; used to stub tests out in the harness tests.
using TestRunner =
    std::function<bool(const Series& sample, std::uint64_t test_seed)>;

McCell run_cell_with(const TestRunner& runner, Method label, NoiseKind noise,
                     double varphi, const McConfig& cfg);

McCell run_cell(Method method, NoiseKind noise, double varphi,
                const McConfig& cfg);

// Runs every (test, noise, varphi) cell of the grid. Bit-identical output
// for a fixed master seed regardless of cfg.parallelism.
McTable run_table(const McConfig& cfg);

// Writes <stem>.csv (machine) and <stem>.grid.txt (human-readable grid).
void write_outputs(const McTable& table, const std::string& stem);

std::string to_csv(const McTable& table);
std::string to_grid(const McTable& table);

// Parses a CSV produced by write_outputs back into cells (round-trip checks).
McTable read_csv(const std::string& path);

// Deterministic per-unit seeds of the study (exposed for the determinism
// tests): series seeds ignore the method when common_series is set.
std::uint64_t mc_series_seed(const McConfig& cfg, Method method, NoiseKind noise,
                             double varphi, std::size_t rep);
std::uint64_t mc_test_seed(const McConfig& cfg, Method method, NoiseKind noise,
                           double varphi, std::size_t rep);

}  // namespace urtest
