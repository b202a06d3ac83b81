#pragma once

namespace fractaldim {

// Parses the command line and dispatches to the subcommands (stationary,
// dimension, unfold, rscc, validate).  Returns the process exit code:
// 0 ok, 2 validation/configuration problem, 3 numeric failure, 4 budget
// exhaustion.
int run_cli(int argc, const char* const* argv);

}  // namespace fractaldim
