#pragma once

// In-process command line front end.  `run_cli` executes one invocation and
// returns the process exit code: 0 success, 2 a verification/audit ran and
// reported a failure, 1 usage or runtime error.
//
// Subcommands: parse, verify, determine, simulate, transform, reduce,
// solve-recurrence, catalog (list|export), selftest.  Global flags:
// --format json|text, --seed, --tol, --samples.
//
// All report content goes to `out` (stdout by default) and is byte-for-byte
// deterministic for a fixed invocation; timing is written to `err` so it
// never perturbs the report.

#include <iosfwd>
#include <string>
#include <vector>

namespace dpsym {

int run_cli(const std::vector<std::string>& args);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpsym
