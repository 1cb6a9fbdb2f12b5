#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hadinv {

/// Built-in diagnostics with optional fault injection used to verify that the
/// selftest actually detects broken invariants.
enum class FaultInjection { None, ChristoffelSign };

/// Runs the reduced invariant suite, printing one pass/fail row per suite.
/// Returns 0 iff everything passed.
int run_selftest(std::ostream& out, FaultInjection fault = FaultInjection::None);

/// Counterexample walkthrough for the complex exponential map.
int run_demo_exp(std::ostream& out);

/// Command-line entry. Exit codes: 0 success, 2 usage error, 3 solver
/// failure (the failure report is still written as JSON), 4 map parse or
/// domain error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hadinv
