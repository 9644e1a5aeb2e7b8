#pragma once

namespace multiflow {

// Command-line entry point; thin binaries call this.
// Subcommands: run, check, convergence, bracket-test, metric.
// Returns 0 on success, 1 on validation failure (bad config, failed
// invariant checks, malformed files), 2 on numerical failure
// (positivity loss, non-convergence, CFL violation, map folding).
int run_cli(int argc, const char* const* argv);

}  // namespace multiflow
