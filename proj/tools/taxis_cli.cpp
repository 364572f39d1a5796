#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "taxis/harness/config.hpp"
#include "taxis/harness/io.hpp"
#include "taxis/harness/runner.hpp"

using namespace taxis;
using namespace taxis::harness;

namespace {

int report(const RunOutcome& out, bool quiet) {
  if (out.exit_code != kExitOk) {
    std::cerr << "error (" << out.status << "): " << out.message << "\n";
  } else if (!quiet) {
    std::cerr << "status " << out.status << ", output in " << out.dir.string() << "\n";
  }
  return out.exit_code;
}

int with_config(const std::string& path, bool quiet, const std::optional<std::string>& out_dir,
                RunOutcome (*fn)(const RunConfig&, const RunOptions&)) {
  RunConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    std::cerr << "error (" << e.category() << "): " << e.what() << "\n";
    return exit_code_for(e);
  }
  RunOptions opts;
  opts.quiet = quiet;
  if (out_dir) opts.out_dir = *out_dir;
  return report(fn(cfg, opts), quiet);
}

int compare(const std::string& a, const std::string& b, double tol, const std::vector<std::string>& columns,
            bool quiet) {
  try {
    const CompareResult r = compare_snapshots(read_snapshot(a), read_snapshot(b), tol, columns);
    if (!quiet || !r.passed) {
      for (const auto& c : r.columns)
        std::printf("%-3s max_abs_diff = %.6e\n", c.column.c_str(), c.max_abs_diff);
      std::printf("worst: column %s row %zu", r.worst_column.c_str(), r.worst_row);
      for (double x : r.worst_coords) std::printf(" %.6g", x);
      std::printf(" diff %.6e (tol %.3e)\n", r.worst_diff, tol);
      std::printf("%s\n", r.passed ? "PASS" : "FAIL");
    }
    return r.passed ? kExitOk : kExitCompareFailed;
  } catch (const Error& e) {
    std::cerr << "error (" << e.category() << "): " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume solver for indirect chemotaxis with Lotka-Volterra kinetics"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  std::string config_path;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "single indirect or limit run (or dispatch on the config)");
  run->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "output directory (overrides [output] dir)");

  auto* sweep = app.add_subcommand("sweep", "epsilon convergence sweep");
  sweep->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", out_dir, "output directory");

  auto* mms = app.add_subcommand("mms", "manufactured-solution refinement study");
  mms->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  mms->add_option("-o,--out", out_dir, "output directory");

  std::string snap_a, snap_b;
  double tol = 1e-10;
  std::vector<std::string> columns;
  auto* cmp = app.add_subcommand("compare", "compare two snapshot files");
  cmp->add_option("a", snap_a, "first snapshot")->required();
  cmp->add_option("b", snap_b, "second snapshot")->required();
  cmp->add_option("-t,--tol", tol, "max abs difference allowed")->check(CLI::NonNegativeNumber);
  cmp->add_option("--columns", columns, "restrict to these columns")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*run) return with_config(config_path, quiet, out_dir, &harness::run);
  if (*sweep) return with_config(config_path, quiet, out_dir, &run_sweep);
  if (*mms)
    return with_config(config_path, quiet, out_dir, [](const RunConfig& c, const RunOptions& o) {
      RunConfig cfg = c;
      cfg.mms.enabled = true;
      return run_mms(cfg, o);
    });
  return compare(snap_a, snap_b, tol, columns, quiet);
}
