// maple: command-line front end for extraction, augmentation and the exact
// verification oracles.
//
// Exit codes: 0 success, 1 domain error (JSON object on stderr), 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maple/maple.hpp"

namespace fs = std::filesystem;
using namespace maple;

namespace {

int report_error(std::string_view tag, const std::string& message) {
  std::cerr << json{{"error", tag}, {"message", message}}.dump() << "\n";
  return 1;
}

struct CommonFlags {
  std::string instance;
  std::string out;
  std::optional<std::size_t> threads;

  std::size_t thread_count() const { return threads ? *threads : default_threads(); }
};

void add_extraction_flags(CLI::App* cmd, ExtractionConfig& cfg) {
  cmd->add_option("--num-starts", cfg.num_starts, "number of extraction starts N")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  cmd->add_option("--epochs", cfg.epochs, "optimizer iterations T per start")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  cmd->add_option("--lambda1", cfg.lambda1, "integrality weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lambda2", cfg.lambda2, "nonzero weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--step-size", cfg.step_size, "optimizer step size")->check(CLI::PositiveNumber);
  cmd->add_option("--max-pool", cfg.max_pool_size, "pool size cap");
}

void add_solve_flags(CLI::App* cmd, SolveConfig& cfg) {
  add_extraction_flags(cmd, cfg.extraction);
  cmd->add_option("--num-feasible-starts", cfg.num_feasible_starts, "feasibility starts K")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  cmd->add_option("--lambda3", cfg.lambda3, "feasibility integrality weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--feasibility-epochs", cfg.feasibility_epochs, "feasibility iterations");
  cmd->add_option("--feasibility-step-size", cfg.feasibility_step_size, "feasibility step size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step-cap", cfg.step_cap, "step-length enumeration cap");
}

void add_common(CLI::App* cmd, CommonFlags& common, bool needs_out) {
  cmd->add_option("--instance", common.instance, "instance file (.json or .qplib)")->required();
  auto* out = cmd->add_option("--out", common.out, "output file");
  if (needs_out) out->required();
  cmd->add_option("--threads", common.threads, "worker threads (default: MAPLE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_extract(const CommonFlags& common, ExtractionConfig cfg) {
  const Problem p = load_problem(common.instance);
  cfg.threads = common.thread_count();
  const auto t0 = std::chrono::steady_clock::now();
  const DirectionPool pool = extract_directions(p.A, p.l, p.u, cfg);
  const double ple = ms_since(t0);
  write_file(common.out, write_pool(pool));
  std::cout << "pool_size: " << pool.size() << "\n"
            << "ple_ms: " << std::fixed << std::setprecision(3) << ple << "\n";
  return 0;
}

int cmd_solve(const CommonFlags& common, const std::string& pool_path, SolveConfig cfg) {
  const Problem p = load_problem(common.instance);
  cfg.threads = common.thread_count();
  std::optional<DirectionPool> reuse;
  if (!pool_path.empty()) {
    const DirectionPool loaded = parse_pool(read_file(pool_path));
    if (loaded.n != p.n() || loaded.m != p.m())
      fail(ErrorKind::DimensionError, "pool has (n, m) = (" + std::to_string(loaded.n) + ", " +
                                          std::to_string(loaded.m) + "), instance has (" +
                                          std::to_string(p.n()) + ", " + std::to_string(p.m()) + ")");
    reuse = restrict_pool(loaded, p.l, p.u);
  }
  const SolveReport report = maple_solve(p, cfg, reuse ? &*reuse : nullptr);
  if (!common.out.empty()) write_file(common.out, write_report(report));
  std::cout << "status: " << status_name(report.status) << "\n";
  if (report.best)
    std::cout << "best_objective: " << std::setprecision(17) << report.best->objective << "\n";
  else
    std::cout << "best_objective: none\n";
  std::cout << std::fixed << std::setprecision(3)
            << "ma_ms: " << report.timings_ms.at("feasibility") + report.timings_ms.at("augmentation")
            << "\n"
            << "ple_ms: " << report.timings_ms.at("extraction") << "\n"
            << "pool_size: " << report.pool_size << "\n";
  return 0;
}

int cmd_oracle(const CommonFlags& common, const EnumerationLimits& limits) {
  const Problem p = load_problem(common.instance);
  const Box box = Box::difference_box(p.l, p.u);
  const DirectionSet graver = graver_oracle(p.A, box, limits);
  const DirectionPool pool = DirectionPool::from_set(p.n(), p.m(), box, graver);
  write_file(common.out, write_pool(pool));
  std::cout << "graver_size: " << pool.size() << "\n";
  return 0;
}

json matrix_json(const IntegerMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).get_str());
    rows.push_back(std::move(r));
  }
  return rows;
}

int cmd_check_lattice(const CommonFlags& common) {
  const Problem p = load_problem(common.instance);
  const HnfResult h = hnf(p.A);
  const IntegerMatrix ac = p.A * h.C;
  bool ac_ok = true;
  for (std::size_t i = 0; i < ac.rows(); ++i)
    for (std::size_t j = 0; j < ac.cols(); ++j)
      if (ac(i, j) != (j < p.m() ? h.H(i, j) : Integer(0))) ac_ok = false;
  json j{{"H", matrix_json(h.H)},
         {"det_C", determinant(h.C).get_str()},
         {"AC_equals_H0", ac_ok}};
  if (p.n() > p.m()) {
    const IntegerMatrix reduced = lll_reduce(h.B);
    j["kernel_basis"] = matrix_json(h.B);
    j["reduced_basis"] = matrix_json(reduced);
    j["reduced_is_lll"] = is_lll_reduced(reduced);
    j["A_times_reduced_is_zero"] = (p.A * reduced).is_zero();
  }
  const std::string text = j.dump(2) + "\n";
  if (!common.out.empty()) write_file(common.out, text);
  std::cout << text;
  return 0;
}

struct BenchRow {
  std::string name;
  std::string n = "-", m = "-", ma = "-", ple = "-", obj = "-", brute = "-", gap = "-";
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

BenchRow bench_one(const fs::path& path, const SolveConfig& cfg, bool oracle_pool,
                   const EnumerationLimits& limits) {
  BenchRow row;
  row.name = path.filename().string();
  Problem p;
  try {
    p = load_problem(path.string());
  } catch (const Error& e) {
    row.obj = e.kind() == ErrorKind::Io ? "io_error" : "parse_error";
    return row;
  }
  row.n = std::to_string(p.n());
  row.m = std::to_string(p.m());
  try {
    std::optional<DirectionPool> pool;
    if (oracle_pool) {
      const Box box = Box::difference_box(p.l, p.u);
      pool = DirectionPool::from_set(p.n(), p.m(), box, graver_oracle(p.A, box, limits));
    }
    const SolveReport r = maple_solve(p, cfg, pool ? &*pool : nullptr);
    row.ma = fmt(r.timings_ms.at("feasibility") + r.timings_ms.at("augmentation"));
    row.ple = fmt(r.timings_ms.at("extraction"));
    row.obj = r.best ? fmt(r.best->objective, 12) : "no_feasible_found";
    try {
      if (const auto opt = brute_force_optimum(p, limits)) {
        row.brute = fmt(opt->objective, 12);
        if (r.best) row.gap = fmt(r.best->objective - opt->objective, 12);
      } else {
        row.brute = "infeasible";
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooLarge) throw;
      row.brute = "too_large";
    }
  } catch (const Error& e) {
    row.obj = std::string(error_tag(e.kind()));
  }
  return row;
}

int cmd_bench(const std::string& dir, const std::string& out, SolveConfig cfg,
              std::optional<std::size_t> threads, bool oracle_pool,
              const EnumerationLimits& limits) {
  if (!fs::is_directory(dir)) fail(ErrorKind::Io, "not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  cfg.threads = threads ? *threads : default_threads();

  std::vector<BenchRow> rows(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) rows[i] = bench_one(files[i], cfg, oracle_pool, limits);

  std::ostringstream table;
  table << "name\tn\tm\tMA_ms\tPLE_ms\tobj\tbrute_obj\tgap\n";
  for (const auto& r : rows)
    table << r.name << '\t' << r.n << '\t' << r.m << '\t' << r.ma << '\t' << r.ple << '\t' << r.obj
          << '\t' << r.brute << '\t' << r.gap << '\n';
  if (!out.empty()) write_file(out, table.str());
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maple: Graver-basis extraction and multi-start augmentation"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "random seed"); };

  CommonFlags extract_flags;
  ExtractionConfig extract_cfg;
  auto* extract = app.add_subcommand("extract", "harvest a direction pool");
  add_common(extract, extract_flags, true);
  add_extraction_flags(extract, extract_cfg);
  add_seed(extract);

  CommonFlags solve_flags;
  SolveConfig solve_cfg;
  std::string pool_path;
  auto* solve = app.add_subcommand("solve", "extract (or reuse) a pool and run multi-start augmentation");
  add_common(solve, solve_flags, false);
  add_solve_flags(solve, solve_cfg);
  solve->add_option("--pool", pool_path, "precomputed pool file");
  add_seed(solve);

  CommonFlags oracle_flags;
  EnumerationLimits limits;
  auto* oracle = app.add_subcommand("oracle", "exact Graver elements inside [l-u, u-l]");
  add_common(oracle, oracle_flags, true);
  for (auto* cmd : {oracle}) {
    cmd->add_option("--node-budget", limits.node_budget, "enumeration node budget");
    cmd->add_option("--max-dim", limits.max_dim, "largest n the enumeration accepts");
  }

  CommonFlags lattice_flags;
  auto* lattice = app.add_subcommand("check-lattice", "HNF, kernel basis and LLL diagnostics");
  add_common(lattice, lattice_flags, false);

  std::string bench_dir;
  std::string bench_out;
  std::optional<std::size_t> bench_threads;
  bool bench_oracle_pool = false;
  SolveConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "solve every instance in a directory and compare to brute force");
  bench->add_option("--dir", bench_dir, "directory of instances")->required();
  bench->add_option("--out", bench_out, "write the table here as well");
  bench->add_option("--threads", bench_threads, "worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--oracle-pool", bench_oracle_pool, "use the exact oracle as the pool");
  bench->add_option("--node-budget", limits.node_budget, "enumeration node budget");
  add_solve_flags(bench, bench_cfg);
  add_seed(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*extract) {
      extract_cfg.seed = seed;
      return cmd_extract(extract_flags, extract_cfg);
    }
    if (*solve) {
      solve_cfg.seed = seed;
      solve_cfg.extraction.seed = seed;
      return cmd_solve(solve_flags, pool_path, solve_cfg);
    }
    if (*oracle) return cmd_oracle(oracle_flags, limits);
    if (*lattice) return cmd_check_lattice(lattice_flags);
    if (*bench) {
      bench_cfg.seed = seed;
      bench_cfg.extraction.seed = seed;
      return cmd_bench(bench_dir, bench_out, bench_cfg, bench_threads, bench_oracle_pool, limits);
    }
  } catch (const Error& e) {
    return report_error(error_tag(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 2;
}
