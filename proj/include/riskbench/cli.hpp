#ifndef RISKBENCH_CLI_HPP
#define RISKBENCH_CLI_HPP

#include <iosfwd>

namespace riskbench {

/// Exit codes of the riskbench binary.
enum ExitCode { kExitOk = 0, kExitViolation = 1, kExitUsage = 2 };

/// Entry point behind the riskbench binary. Subcommands: run, hard, fit,
/// reduce, complexity, fetch, selftest. Results go to `out` (or --out files),
/// diagnostics to `err`. Every invocation appends one line to a manifest.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskbench

#endif  // RISKBENCH_CLI_HPP
