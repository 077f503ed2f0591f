#include "urtest/mc.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "urtest/baselines.hpp"
#include "urtest/lpb.hpp"
#include "urtest/rng.hpp"

namespace urtest {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

// Stable integer key for a varphi grid value (multiples of 0.0001 suffice).
std::uint64_t varphi_key(double varphi) {
  return static_cast<std::uint64_t>(std::llround(-varphi * 10000.0));
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

const McCell* McTable::find(Method m, NoiseKind k, double varphi) const {
  for (const auto& cell : cells)
    if (cell.method == m && cell.noise == k &&
        std::abs(cell.varphi - varphi) < 1e-12)
      return &cell;
  return nullptr;
}

std::uint64_t mc_series_seed(const McConfig& cfg, Method method, NoiseKind noise,
                             double varphi, std::size_t rep) {
  const std::uint64_t method_part =
      cfg.common_series ? 0 : static_cast<std::uint64_t>(method) + 1;
  return substream_seed(cfg.master_seed,
                        {stream::series, method_part,
                         static_cast<std::uint64_t>(noise), varphi_key(varphi),
                         rep});
}

std::uint64_t mc_test_seed(const McConfig& cfg, Method method, NoiseKind noise,
                           double varphi, std::size_t rep) {
  return substream_seed(cfg.master_seed,
                        {stream::test, static_cast<std::uint64_t>(method) + 1,
                         static_cast<std::uint64_t>(noise), varphi_key(varphi),
                         rep});
}

McConfig parse_mc_config(const std::string& text) {
  McConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::parse_error, "config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "tests") {
        cfg.tests.clear();
        for (const auto& name : split_list(value)) {
          const auto m = method_from_name(name);
          if (!m) fail(errc::parse_error, "key 'tests': unknown test '" + name + "'");
          cfg.tests.push_back(*m);
        }
      } else if (key == "noises") {
        cfg.noises.clear();
        for (const auto& name : split_list(value)) {
          const auto k = noise_from_name(name);
          if (!k) fail(errc::parse_error, "key 'noises': unknown noise '" + name + "'");
          cfg.noises.push_back(*k);
        }
      } else if (key == "varphis") {
        cfg.varphis.clear();
        for (const auto& item : split_list(value))
          cfg.varphis.push_back(std::stod(item));
      } else if (key == "n") {
        cfg.n = std::stoull(value);
      } else if (key == "reps") {
        cfg.reps = std::stoull(value);
      } else if (key == "B") {
        cfg.B = std::stoull(value);
      } else if (key == "size") {
        cfg.size = std::stod(value);
      } else if (key == "master_seed") {
        cfg.master_seed = std::stoull(value);
      } else if (key == "parallelism") {
        cfg.parallelism = static_cast<unsigned>(std::stoul(value));
      } else {
        fail(errc::parse_error, "unknown config key '" + key + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(errc::parse_error, "key '" + key + "': bad value '" + value + "'");
    }
  }
  if (cfg.tests.empty()) fail(errc::parse_error, "key 'tests': empty list");
  if (cfg.noises.empty()) fail(errc::parse_error, "key 'noises': empty list");
  if (cfg.varphis.empty()) fail(errc::parse_error, "key 'varphis': empty list");
  if (!(cfg.size > 0.0 && cfg.size < 1.0))
    fail(errc::parse_error, "key 'size': must lie in (0,1)");
  if (cfg.reps < 1) fail(errc::parse_error, "key 'reps': must be >= 1");
  if (cfg.B < 1) fail(errc::parse_error, "key 'B': must be >= 1");
  if (cfg.n < 16) fail(errc::parse_error, "key 'n': must be >= 16");
  if (cfg.parallelism < 1) cfg.parallelism = 1;
  return cfg;
}

McConfig read_mc_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mc_config(buf.str());
}

namespace {

TestRunner make_runner(Method method, const McConfig& cfg) {
  switch (method) {
    case Method::adf:
      return [&cfg](const Series& y, std::uint64_t) {
        const double sizes[] = {cfg.size};
        const auto& cv = cv_table_cached(cfg.n, cfg.cv_paths, cfg.cv_seed, sizes,
                                         cfg.cache_dir);
        return adf_test(y, default_k_max(y.size()), cfg.size, cv).reject;
      };
    case Method::arb_adf:
      return [&cfg](const Series& y, std::uint64_t seed) {
        return arb_adf_test(y, cfg.B, cfg.size, default_k_max(y.size()), seed)
            .reject;
      };
    case Method::fpp:
      return [&cfg](const Series& y, std::uint64_t) {
        const double sizes[] = {cfg.size};
        const auto& cv = cv_table_cached(cfg.n, cfg.cv_paths, cfg.cv_seed, sizes,
                                         cfg.cache_dir);
        return fpp_test(y, cfg.size, BandwidthRule::adaptive(), cv).reject;
      };
    case Method::lpb_pp:
      return [&cfg](const Series& y, std::uint64_t seed) {
        return lpb_test(y, cfg.B, cfg.size, BandwidthRule::adaptive(), seed)
            .reject;
      };
    case Method::cbb_pp:
      return [&cfg](const Series& y, std::uint64_t seed) {
        return cbb_pp_test(y, cfg.B, cfg.size, seed).reject;
      };
  }
  fail(errc::invalid_argument, "unknown method");
}

// One (cell, rep) unit. Returns 0 = accept, 1 = reject; throws on failure.
bool run_unit(const TestRunner& runner, Method method, NoiseKind noise,
              double varphi, std::size_t rep, const McConfig& cfg) {
  DgpSpec spec;
  spec.noise.kind = noise;
  spec.varphi = varphi;
  spec.n = cfg.n;
  spec.burn_in = cfg.burn_in;
  auto rng = std::mt19937_64(mc_series_seed(cfg, method, noise, varphi, rep));
  const Series sample = gen_series(spec, rng);
  return runner(sample, mc_test_seed(cfg, method, noise, varphi, rep));
}

}  // namespace

McCell run_cell_with(const TestRunner& runner, Method label, NoiseKind noise,
                     double varphi, const McConfig& cfg) {
  McCell cell;
  cell.method = label;
  cell.noise = noise;
  cell.varphi = varphi;
  cell.reps = cfg.reps;
  cell.seed_root = substream_seed(
      cfg.master_seed, {stream::test, static_cast<std::uint64_t>(label) + 1,
                        static_cast<std::uint64_t>(noise), varphi_key(varphi)});
  std::string first_error;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    try {
      if (run_unit(runner, label, noise, varphi, rep, cfg)) ++cell.rejects;
    } catch (const std::exception& e) {
      ++cell.failures;
      if (first_error.empty()) first_error = e.what();
    }
  }
  // Degenerate draws are astronomically unlikely with continuous
  // innovations; more than 1% failures means a bug, so abort loudly.
  if (cell.failures * 100 > cfg.reps)
    fail(errc::replicate_failure,
         std::string("cell aborted, >1% of reps failed: ") + first_error);
  return cell;
}

McCell run_cell(Method method, NoiseKind noise, double varphi,
                const McConfig& cfg) {
  return run_cell_with(make_runner(method, cfg), method, noise, varphi, cfg);
}

McTable run_table(const McConfig& cfg) {
  McTable table;
  table.config = cfg;

  struct CellKey {
    Method method;
    NoiseKind noise;
    double varphi;
  };
  std::vector<CellKey> keys;
  for (Method m : cfg.tests)
    for (NoiseKind k : cfg.noises)
      for (double v : cfg.varphis) keys.push_back({m, k, v});

  // Pre-build the critical-value table once so worker threads only read it.
  const bool needs_cv =
      std::any_of(cfg.tests.begin(), cfg.tests.end(), [](Method m) {
        return m == Method::adf || m == Method::fpp;
      });
  if (needs_cv) {
    const double sizes[] = {cfg.size};
    cv_table_cached(cfg.n, cfg.cv_paths, cfg.cv_seed, sizes, cfg.cache_dir);
  }

  std::vector<TestRunner> runners(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    runners[i] = make_runner(keys[i].method, cfg);

  // Every (cell, rep) unit is an independent task with its own seed; the
  // status array makes the aggregation identical for any thread count.
  const std::size_t units = keys.size() * cfg.reps;
  std::vector<std::uint8_t> status(units, 0);  // 0 accept, 1 reject, 2 failed
  std::vector<std::string> unit_error(units);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units) return;
      const std::size_t ci = u / cfg.reps;
      const std::size_t rep = u % cfg.reps;
      const CellKey& key = keys[ci];
      try {
        status[u] = run_unit(runners[ci], key.method, key.noise, key.varphi,
                             rep, cfg)
                        ? 1
                        : 0;
      } catch (const std::exception& e) {
        status[u] = 2;
        unit_error[u] = e.what();
      }
    }
  };

  const unsigned threads = std::max(1u, cfg.parallelism);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t ci = 0; ci < keys.size(); ++ci) {
    McCell cell;
    cell.method = keys[ci].method;
    cell.noise = keys[ci].noise;
    cell.varphi = keys[ci].varphi;
    cell.reps = cfg.reps;
    cell.seed_root =
        substream_seed(cfg.master_seed,
                       {stream::test,
                        static_cast<std::uint64_t>(keys[ci].method) + 1,
                        static_cast<std::uint64_t>(keys[ci].noise),
                        varphi_key(keys[ci].varphi)});
    std::string first_error;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const std::uint8_t s = status[ci * cfg.reps + rep];
      if (s == 1) ++cell.rejects;
      if (s == 2) {
        ++cell.failures;
        if (first_error.empty()) first_error = unit_error[ci * cfg.reps + rep];
      }
    }
    if (cell.failures * 100 > cfg.reps) {
      table.errors.push_back(std::string(method_name(cell.method)) + "," +
                             noise_name(cell.noise) + "," +
                             format_double(cell.varphi) +
                             ": >1% of reps failed: " + first_error);
      continue;
    }
    table.cells.push_back(cell);
  }
  return table;
}

std::string to_csv(const McTable& table) {
  std::string out = "method,noise,varphi,rate,reps,seed_root\n";
  for (const auto& cell : table.cells) {
    out += method_name(cell.method);
    out += ',';
    out += noise_name(cell.noise);
    out += ',';
    out += format_double(cell.varphi);
    out += ',';
    out += format_double(cell.rate());
    out += ',';
    out += std::to_string(cell.reps);
    out += ',';
    out += std::to_string(cell.seed_root);
    out += '\n';
  }
  return out;
}

std::string to_grid(const McTable& table) {
  std::string out;
  char buf[128];
  for (Method m : table.config.tests) {
    std::snprintf(buf, sizeof(buf), "%-8s varphi", method_name(m));
    out += buf;
    for (NoiseKind k : table.config.noises) {
      std::snprintf(buf, sizeof(buf), " %8s", noise_name(k));
      out += buf;
    }
    out += '\n';
    for (double v : table.config.varphis) {
      std::snprintf(buf, sizeof(buf), "%8s %6.2f", "", v);
      out += buf;
      for (NoiseKind k : table.config.noises) {
        const McCell* cell = table.find(m, k, v);
        if (cell)
          std::snprintf(buf, sizeof(buf), " %8.3f", cell->rate());
        else
          std::snprintf(buf, sizeof(buf), " %8s", "!");
        out += buf;
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void write_outputs(const McTable& table, const std::string& stem) {
  {
    std::ofstream csv(stem + ".csv", std::ios::binary);
    if (!csv) fail(errc::io_error, "cannot open " + stem + ".csv");
    csv << to_csv(table);
    if (!csv) fail(errc::io_error, "write failed for " + stem + ".csv");
  }
  {
    std::ofstream grid(stem + ".grid.txt", std::ios::binary);
    if (!grid) fail(errc::io_error, "cannot open " + stem + ".grid.txt");
    grid << to_grid(table);
    if (!grid) fail(errc::io_error, "write failed for " + stem + ".grid.txt");
  }
}

McTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  McTable table;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "method,noise,varphi,rate,reps,seed_root")
    fail(errc::parse_error, "bad CSV header in " + path);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_list(line);
    if (fields.size() != 6)
      fail(errc::parse_error,
           path + ": line " + std::to_string(lineno) + ": expected 6 fields");
    McCell cell;
    const auto m = method_from_name(fields[0]);
    const auto k = noise_from_name(fields[1]);
    if (!m || !k)
      fail(errc::parse_error,
           path + ": line " + std::to_string(lineno) + ": bad method or noise");
    cell.method = *m;
    cell.noise = *k;
    try {
      cell.varphi = std::stod(fields[2]);
      const double rate = std::stod(fields[3]);
      cell.reps = std::stoull(fields[4]);
      cell.seed_root = std::stoull(fields[5]);
      cell.rejects = static_cast<std::size_t>(
          std::llround(rate * static_cast<double>(cell.reps)));
    } catch (const std::exception&) {
      fail(errc::parse_error,
           path + ": line " + std::to_string(lineno) + ": bad number");
    }
    table.cells.push_back(cell);
  }
  return table;
}

}  // namespace urtest
