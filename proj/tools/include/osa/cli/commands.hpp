#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "osa/cli/config.hpp"

namespace osa::cli {

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,
  kExitConditions = 2,
  kExitBudget = 3,
  kExitVerification = 4,
};

/// Where a command writes: the JSON/CSV document goes to `out` and to a file
/// in the output directory; notes and warnings go to `err`.
struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Closed-form optimality conditions. Writes <name>.json; returns 0 when all
/// hold, 2 otherwise.
int cmd_check(const RunConfig& config, Streams io);

/// Myopic and optimal values. Writes <name>.json; 3 on budget overrun.
int cmd_solve(const RunConfig& config, Streams io);

/// Monte Carlo value of the configured policy. Writes <name>.json and, if
/// requested, <name>-trace.csv.
int cmd_simulate(const RunConfig& config, Streams io);

/// Lemma verifiers (and the theorem when its conditions hold). Writes
/// <name>.json plus <name>-<verifier>-failure.json per violation; 4 on any
/// violation.
int cmd_verify(const RunConfig& config, Streams io);

/// Grid sweep. Writes <name>.csv; budget markers still exit 0.
int cmd_sweep(const RunConfig& config, Streams io);

/// Full command line: `osa <check|solve|simulate|verify|sweep> [options]`.
int run(const std::vector<std::string>& args, Streams io);

}  // namespace osa::cli
