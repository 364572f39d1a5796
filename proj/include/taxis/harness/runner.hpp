#ifndef TAXIS_HARNESS_RUNNER_HPP
#define TAXIS_HARNESS_RUNNER_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "taxis/analysis.hpp"
#include "taxis/harness/config.hpp"
#include "taxis/mms.hpp"

namespace taxis::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitCompareFailed = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitBlowup = 4,
  kExitIo = 5,
};

int exit_code_for(const Error& e);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides [output] dir
  bool quiet = false;
  std::ostream* log = nullptr;  // progress messages; stderr when null
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;  // ok | violations | error category
  std::string message;
  std::filesystem::path dir;
};

InitialData<double> initial_data_from(const RunConfig& cfg);

// In-memory entry points shared by the CLI and the tests.
Trajectory<double> solve_from_config(const RunConfig& cfg);
SweepReport sweep_from_config(const RunConfig& cfg);
MmsReport mms_from_config(const RunConfig& cfg);

// Executes a config and writes its artifacts. Library errors are caught and
// reported through the exit code; a completed run with failed invariant
// checks exits 0 with status "violations".
RunOutcome run(const RunConfig& cfg, const RunOptions& opts = {});
RunOutcome run_sweep(const RunConfig& cfg, const RunOptions& opts = {});
RunOutcome run_mms(const RunConfig& cfg, const RunOptions& opts = {});

}  // namespace taxis::harness

#endif  // TAXIS_HARNESS_RUNNER_HPP
