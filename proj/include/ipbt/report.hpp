#pragma once

// Command implementations behind the CLI. Each returns a RunReport; the caller
// prints it and maps exceptions to exit codes with exit_code_for().

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "ipbt/benchmarks.hpp"
#include "ipbt/io.hpp"
#include "ipbt/lp.hpp"

namespace ipbt {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitVerification = 3,
  kExitPrecondition = 4,
};

struct RunOptions {
  std::optional<RationalVector> weights;  // weighted relaxed-problem cross-check
  bool seller_iir = false;                // ex-ante variant with seller participation
  std::optional<std::string> csv_dir;
  bool timing = false;
  LpOptions lp;
};

struct RunReport {
  std::string command;
  std::string digest;
  io::Json outputs;
  std::vector<PropertyCheck> verification;
  std::optional<double> seconds;

  bool verified() const;
  io::Json to_json() const;
};

/// kind: rsw, full-info, ex-ante, efficient.
RunReport cmd_solve(const std::string& kind, const Environment& env, const RunOptions& options);

/// kind: feasible, core, strong-solution, fgp, snp. `alloc` is required for
/// feasible and core (InputError("MissingAllocation") otherwise).
RunReport cmd_check(const std::string& kind, const Environment& env,
                    const std::optional<Allocation>& alloc, const RunOptions& options);

/// Comparison report, every check and (two seller types) the payoff polygon.
/// Writes plot.csv and, when present, polygon.csv into options.csv_dir.
RunReport cmd_report(const Environment& env, const RunOptions& options);

/// 2 input, 4 precondition, 3 verification or anything else.
int exit_code_for(const std::exception& e);

/// Parses "w1,w2,..." into rationals; throws InputError("InvalidWeights").
RationalVector parse_weights(const std::string& text);

}  // namespace ipbt
