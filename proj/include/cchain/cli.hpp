#pragma once

#include <string>
#include <vector>

namespace cchain {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // I/O or other unexpected error
  kExitUsage = 2,        // invalid flags or parameter values
  kExitSampler = 3,      // sampler error
  kExitSpectralGap = 4,  // degenerate spectral gap
  kExitFit = 5,          // decay fit failed (including gamma = 0)
  kExitVariance = 6,     // sigma_N^2 not positive
  kExitReplay = 7,       // replayed digests differ
};

// args excludes the program name, e.g. {"exact", "zn", "--n", "8"}.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace cchain
